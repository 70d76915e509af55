"""Command-line interface: manifest-driven computations with canonical,
byte-stable text output.

Commands: validate, invert, pair, gram, perfectness, lseries, examples.
Exit codes: 0 success, 2 parse error, 3 validation failure, 4
convergence-cap exceeded, 5 precision escalation exhausted.
"""

from __future__ import annotations

import argparse
import random
import sys

from .errors import (ConvergenceError, DimensionError, FieldError,
                     NotInvertibleError, PrecisionError, SkewParseError,
                     TauresError)
from . import anderson, lseries, pairing
from .fields import Fq, find_irreducible
from .parsing import (Manifest, manifest_ext_field, manifest_tau_matrix,
                      parse_manifest, parse_skew_row, ext_field_of_degree)
from .skewmat import SkewMatrix, invert_series_matrix

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_CONVERGENCE = 4
EXIT_PRECISION = 5

WEIGHT_NOTE = ("note: b is measured from the gram coefficients; module "
               "weights are not computed, so no bound involving weights "
               "is checked")


def render_manifest(man: Manifest) -> str:
    """Canonical manifest text; parse(render(parse(x))) == parse(x)."""
    lines = ["q: {}".format(man.q)]
    if man.modulus is not None:
        lines.append("modulus: {}".format(_payload(man.modulus)))
    lines.append("base: {}".format(man.base))
    if man.theta_text is not None:
        lines.append("theta: {}".format(_payload(man.theta_text)))
    lines.append("dim: {}".format(man.dim))
    if man.rank is not None:
        lines.append("rank: {}".format(man.rank))
    lines.append("phi_t:")
    for row in man.phi_rows:
        lines.append("row: {}".format(_payload(row)))
    lines.append("motive_basis:")
    for row in man.motive_rows:
        lines.append("row: {}".format(_payload(row)))
    lines.append("comotive_basis:")
    for col in man.comotive_cols:
        lines.append("col: {}".format(_payload(col)))
    if man.ext_degree is not None:
        lines.append("ext_degree: {}".format(man.ext_degree))
    if man.ext_modulus_text is not None:
        lines.append("ext_modulus: {}".format(_payload(man.ext_modulus_text)))
    for key in ("tau_matrix_motive", "tau_matrix_comotive"):
        rows = man.tau_matrix_rows.get(key)
        if rows:
            lines.append("{}:".format(key))
            for row in rows:
                lines.append("row: {}".format(_payload(row)))
    return "\n".join(lines) + "\n"


def _payload(entry):
    text = entry[0] if isinstance(entry, tuple) else entry
    return " ".join(str(text).split())


# --- built-in example registry ---

def _default_modulus_text(q):
    p = 2
    while q % p:
        p += 1
    m = 0
    n = q
    while n % p == 0:
        n //= p
        m += 1
    if m == 1:
        return None
    fp = Fq(p)
    poly = find_irreducible(fp, m)
    return poly.render("z", coeff_str=lambda c: str(c.coeffs[0]),
                       coeff_is_one=lambda c: c.is_one())


def _manifest_skeleton(q):
    man = Manifest()
    man.q = q
    mod = _default_modulus_text(q)
    if mod is not None:
        man.modulus = mod
    man.base = "perf-rational"
    return man


def example_carlitz(q=2):
    man = _manifest_skeleton(q)
    man.dim = 1
    man.rank = 1
    man.phi_rows = ["theta + tau"]
    man.motive_rows = ["1"]
    man.comotive_cols = ["1"]
    return man


def example_carlitz_tensor(q=2, d=2):
    man = _manifest_skeleton(q)
    man.dim = d
    man.rank = 1
    rows = []
    for i in range(d):
        entries = ["0"] * d
        entries[i] = "theta"
        if i + 1 < d:
            entries[i + 1] = "1"
        if i == d - 1:
            entries[0] = "tau" if d > 1 else "theta + tau"
        rows.append(" | ".join(entries))
    if d == 1:
        rows = ["theta + tau"]
    man.phi_rows = rows
    man.motive_rows = [" | ".join(["1"] + ["0"] * (d - 1))]
    man.comotive_cols = [" | ".join(["0"] * (d - 1) + ["1"])]
    return man


def example_maurischat(q=2):
    man = _manifest_skeleton(q)
    man.dim = 2
    man.rank = 3
    man.phi_rows = ["theta + tau^2 | tau^3", "1 + tau | theta + tau^2"]
    man.motive_rows = ["0 | tau", "0 | 1", "1 | 0"]
    man.comotive_cols = ["tau | 0", "1 | 0", "0 | 1"]
    return man


def example_drinfeld(q=2, r=2, seed=None, g_texts=None):
    man = _manifest_skeleton(q)
    man.dim = 1
    man.rank = r
    if g_texts is None:
        rng = random.Random(seed if seed is not None else 0)
        p = 2
        while q % p:
            p += 1
        pool = ["1", "theta", "theta + 1", "theta^2"]
        if p > 2:
            pool += ["2", "2*theta"]
        g_texts = [pool[rng.randrange(len(pool))] for _ in range(r - 1)]
        lead_pool = ["1", "theta", "theta^2"]
        g_texts.append(lead_pool[rng.randrange(len(lead_pool))])
    if len(g_texts) != r:
        raise SkewParseError("drinfeld example needs {} coefficients"
                             .format(r), 0, 0)
    terms = ["theta"]
    for i, g in enumerate(g_texts, start=1):
        tau_pow = "tau" if i == 1 else "tau^{}".format(i)
        if g.strip() == "1":
            terms.append(tau_pow)
        else:
            terms.append("({})*{}".format(g.strip(), tau_pow))
    man.phi_rows = [" + ".join(terms)]
    man.motive_rows = ["1" if i == 0 else ("tau" if i == 1 else
                                           "tau^{}".format(i))
                       for i in range(r)]
    man.comotive_cols = list(man.motive_rows)
    return man


EXAMPLES = {
    "carlitz": lambda args: example_carlitz(q=args.q),
    "carlitz-tensor": lambda args: example_carlitz_tensor(q=args.q,
                                                          d=args.d),
    "maurischat": lambda args: example_maurischat(q=args.q),
    "drinfeld": lambda args: example_drinfeld(
        q=args.q, r=args.r, seed=args.seed,
        g_texts=args.g.split(",") if args.g else None),
}


# --- command implementations ---

def _load(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise SkewParseError("cannot read manifest: {}".format(err), 0, 0)
    return parse_manifest(text)


def cmd_validate(args):
    man = _load(args.manifest)
    report = anderson.validate(man.module)
    print(report)
    return 0 if report.ok else EXIT_VALIDATION


def cmd_invert(args):
    man = _load(args.manifest)
    report = anderson.validate(man.module)
    if not report.ok:
        print(report, file=sys.stderr)
        return EXIT_VALIDATION
    inv = invert_series_matrix(man.module.phi_t, args.order)
    print(inv.render())
    return 0


def cmd_pair(args):
    man = _load(args.manifest)
    module = man.module
    pf = module.pf
    theta = module.theta if man.base == "finite-field" else None
    m_entries = parse_skew_row(args.m, pf, theta=theta)
    n_entries = parse_skew_row(args.n, pf, theta=theta)
    if len(m_entries) != module.dim or len(n_entries) != module.dim:
        raise SkewParseError(
            "--m and --n need {} '|'-separated entries".format(module.dim),
            0, 0)
    m = SkewMatrix(pf, [m_entries])
    n = SkewMatrix(pf, [[e] for e in n_entries])
    ctx = pairing.PairingContext(module, k_cap=args.k_cap,
                                 precision_cap=args.precision_cap)
    result = pairing.residue_pair(ctx, m, n)
    print(result)
    return 0


def cmd_gram(args):
    man = _load(args.manifest)
    ctx = pairing.PairingContext(man.module, k_cap=args.k_cap,
                                 precision_cap=args.precision_cap)
    g = pairing.gram(ctx)
    print(g.render())
    print(WEIGHT_NOTE)
    return 0


def cmd_perfectness(args):
    man = _load(args.manifest)
    ctx = pairing.PairingContext(man.module, k_cap=args.k_cap,
                                 precision_cap=args.precision_cap)
    g = pairing.gram(ctx)
    cert = pairing.check_perfectness(g)
    print("K = {}, b = {}, det = {}, perfect = {}".format(
        g.k_cutoff, g.b_level, cert.det,
        "yes" if cert.status == "perfect" else "no"))
    return 0 if cert.status == "perfect" else EXIT_VALIDATION


def cmd_lseries(args):
    man = _load(args.manifest)
    module = man.module
    if args.ext_degree is not None:
        ext = ext_field_of_degree(man.field, args.ext_degree)
    else:
        ext = manifest_ext_field(man)
        if ext is None:
            ext = ext_field_of_degree(man.field, 1)
    tau_mot = manifest_tau_matrix(man, "motive", ext)
    tau_com = manifest_tau_matrix(man, "comotive", ext)
    fit_m = lseries.fitting_ideal(module, ext, "motive", tau_matrix=tau_mot)
    fit_c = lseries.fitting_ideal(module, ext, "comotive",
                                  tau_matrix=tau_com)
    bf = lseries.brute_force_fitting(module, ext)
    consistent = fit_m.unit_equiv(fit_c) and \
        lseries.poly_unit_equiv(fit_m.at_T_one(), bf)
    if tau_mot is None:
        oracle = lseries.fitting_ideal_power_oracle(module, ext, "motive")
        consistent = consistent and oracle.unit_equiv(fit_m)
    print("motive: {}".format(fit_m))
    print("comotive: {}".format(fit_c))
    print("E(k) fitting: {}".format(bf.render(
        "t", coeff_str=str, coeff_is_one=lambda c: c.is_one())))
    print("consistent: {}".format("yes" if consistent else "no"))
    return 0 if consistent else EXIT_VALIDATION


def cmd_examples(args):
    if args.name not in EXAMPLES:
        raise SkewParseError(
            "unknown example {!r}; available: {}".format(
                args.name, ", ".join(sorted(EXAMPLES))), 0, 0)
    man = EXAMPLES[args.name](args)
    sys.stdout.write(render_manifest(man))
    return 0


def build_arg_parser():
    ap = argparse.ArgumentParser(
        prog="taures",
        description="Exact residue-in-tau pairings for Anderson t-modules")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, manifest=True):
        if manifest:
            p.add_argument("manifest", help="path to a module manifest")
        p.add_argument("--precision-cap", type=int, default=64,
                       dest="precision_cap",
                       help="max sigma-precision for escalations")
        p.add_argument("--k-cap", type=int, default=64, dest="k_cap",
                       help="search cap for the convergence exponent k1")

    p = sub.add_parser("validate", help="check the module axioms")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("invert", help="phi(t)^-1 as a truncated matrix")
    common(p)
    p.add_argument("--order", type=int, default=6,
                   help="sigma-precision of the inverse")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("pair", help="pair a motive row with a comotive "
                                    "column")
    common(p)
    p.add_argument("--m", required=True,
                   help="motive element ('|'-separated entries)")
    p.add_argument("--n", required=True,
                   help="comotive element ('|'-separated entries)")
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("gram", help="all pairings of the declared bases")
    common(p)
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("perfectness", help="gram determinant certificate")
    common(p)
    p.set_defaults(func=cmd_perfectness)

    p = sub.add_parser("lseries", help="T-deformation fitting ideals over "
                                       "a finite base")
    common(p)
    p.add_argument("--ext-degree", type=int, default=None, dest="ext_degree",
                   help="degree of k over F_q (overrides the manifest)")
    p.set_defaults(func=cmd_lseries)

    p = sub.add_parser("examples", help="write a built-in example manifest "
                                        "to stdout")
    p.add_argument("name", help="carlitz | carlitz-tensor | drinfeld | "
                                "maurischat")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--d", type=int, default=2, help="tensor power")
    p.add_argument("--r", type=int, default=2, help="drinfeld rank")
    p.add_argument("--seed", type=int, default=None,
                   help="seed for drinfeld coefficients")
    p.add_argument("--g", type=str, default=None,
                   help="comma-separated drinfeld coefficients g_1..g_r")
    p.set_defaults(func=cmd_examples)

    return ap


def main(argv=None):
    ap = build_arg_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SkewParseError as err:
        print(err, file=sys.stderr)
        return EXIT_PARSE
    except ConvergenceError as err:
        print(err, file=sys.stderr)
        return EXIT_CONVERGENCE
    except PrecisionError as err:
        print(err, file=sys.stderr)
        return EXIT_PRECISION
    except (FieldError, DimensionError, NotInvertibleError) as err:
        print(err, file=sys.stderr)
        return EXIT_VALIDATION
    except TauresError as err:
        print(err, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
