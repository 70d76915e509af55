"""T-deformation Fitting ideals over finite base fields.

For a module over the degenerate finite base F_q, extended to a finite
field k of degree d_k, the generator of the Fitting ideal of the
T-deformation is det(T - tau) on the motive (or comotive) after
restricting scalars from k[t] to F_q[t].  tau is q-semilinear on the
motive and q^(-1)-semilinear on the comotive; restriction of scalars
turns either into an honest F_q[t]-linear operator on a module of rank
r * d_k whose characteristic polynomial in T is the generator.

Two independent oracles guard the computation: det(T^d - tau^d) over
k[t] (tau^d is k[t]-linear), and the characteristic polynomial of the
t-action on E(k) = k^dim as an F_q-space, which the T = 1 specialization
must reproduce up to a unit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionError, FieldError
from .anderson import AndersonModule
from .fields import (ExtElement, ExtField, Fq, FqElement, SPoly,
                     needs_parens)

DESK_BOUND = 16  # max dim * [k:F_q] for the brute-force oracle


@dataclass
class TauMatrix:
    """Matrix of the tau-action on a declared basis, entries in k[t]."""

    side: str  # "motive" | "comotive"
    entries: list  # r x r nested list of SPoly over ExtField

    @property
    def rank(self):
        return len(self.entries)


class BivariatePoly:
    """An element of F_q[t][T], normalized monic in T when possible."""

    __slots__ = ("fq", "coeffs")

    def __init__(self, fq: Fq, coeffs):
        """coeffs: list of SPoly over fq, index = T-exponent."""
        self.fq = fq
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        lead = coeffs[-1] if coeffs else None
        if lead is not None and lead.degree() == 0 \
                and not lead.leading().is_one():
            inv = lead.leading().inverse()
            coeffs = [c.scale(inv) for c in coeffs]
        self.coeffs = coeffs

    def degree_T(self):
        return len(self.coeffs) - 1

    def coeff(self, te):
        if 0 <= te < len(self.coeffs):
            return self.coeffs[te]
        return SPoly(self.fq, {})

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return (isinstance(other, BivariatePoly)
                and self.coeffs == other.coeffs)

    def unit_equiv(self, other) -> bool:
        """Equality up to a scalar of F_q^x."""
        if len(self.coeffs) != len(other.coeffs):
            return False
        ratio = None
        for a, b in zip(self.coeffs, other.coeffs):
            if bool(a) != bool(b):
                return False
            if not a:
                continue
            if set(a.terms) != set(b.terms):
                return False
            for e, c in a.terms.items():
                r = c / b.terms[e]
                if ratio is None:
                    ratio = r
                elif r != ratio:
                    return False
        return True

    def at_T_one(self) -> SPoly:
        acc = SPoly(self.fq, {})
        for c in self.coeffs:
            acc = acc + c
        return acc

    def render(self):
        if not self.coeffs:
            return "0"
        parts = []
        for te in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[te]
            if not c:
                continue
            cs = c.render("t", coeff_str=str, coeff_is_one=FqElement.is_one)
            if te == 0:
                parts.append(cs)
                continue
            v = "T" if te == 1 else "T^{}".format(te)
            if c.degree() == 0 and c.leading().is_one():
                parts.append(v)
            else:
                if needs_parens(cs) or "*" in cs:
                    cs = "({})".format(cs)
                parts.append("{}*{}".format(cs, v))
        return " + ".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return "BivariatePoly({})".format(self)


def charpoly(rows, ring):
    """Berkowitz characteristic polynomial det(lambda*I - A), division
    free over any commutative ring; returns coefficients leading-first."""
    n = len(rows)
    if n == 0:
        raise DimensionError("empty matrix")
    one = ring.one()
    poly = [one, -rows[0][0]]
    for i in range(1, n):
        a = rows[i][i]
        row = rows[i][:i]
        col = [rows[r][i] for r in range(i)]
        # s_j = row * (leading submatrix)^j * col
        svals = []
        vec = col
        for _ in range(i):
            svals.append(_dot(row, vec, ring))
            vec = [_dot(rows[r][:i], vec, ring) for r in range(i)]
        conv = [one, -a] + [-s for s in svals]
        new = []
        for x in range(i + 2):
            acc = None
            for z in range(0, min(x, i + 1) + 1):
                y = x - z
                if y >= len(poly):
                    continue
                term = conv[z] * poly[y]
                acc = term if acc is None else acc + term
            new.append(acc if acc is not None else ring.zero())
        poly = new
    return poly


def _dot(row, vec, ring):
    acc = None
    for a, b in zip(row, vec):
        term = a * b
        acc = term if acc is None else acc + term
    return acc if acc is not None else ring.zero()


class _TPolyRing:
    """Minimal ring context for SPoly-over-field used inside charpoly."""

    def __init__(self, field):
        self.field = field

    def zero(self):
        return SPoly(self.field, {})

    def one(self):
        return SPoly(self.field, {0: self.field.one()})


def _extract_drinfeld_g(module: AndersonModule):
    """Left coefficients (g_1..g_r) of a 1x1 phi(t), as F_q constants."""
    if module.dim != 1:
        raise FieldError("tau-matrix auto-derivation needs a Drinfeld "
                         "module; declare tau_matrix blocks instead")
    entry = module.phi_t[0, 0]
    r = int(entry.deg_tau())
    g = []
    for i in range(1, r + 1):
        left = entry.coeff(i).q_power_iter(i)  # right to left coefficient
        g.append(left)
    if not g or not g[-1]:
        raise FieldError("phi(t) must have a nonzero leading tau term")
    return g


def _require_finite(module: AndersonModule):
    if not module.theta.is_constant():
        raise FieldError("L-series need a finite base: theta must be an "
                         "F_q constant")
    for row in module.phi_t.entries:
        for e in row:
            for c in e.coeffs.values():
                if not c.is_constant():
                    raise FieldError("L-series need a finite base: phi(t) "
                                     "coefficients must be F_q constants")


def drinfeld_tau_matrices(module: AndersonModule, ext: ExtField):
    """The companion-shape matrices of tau on the standard bases
    (1, tau, .., tau^(r-1)) of a Drinfeld module, over k[t].

    Motive: tau * tau^(r-1) = g_r^-1 ((t - theta) - g_1 tau - ..).
    Comotive: the same rewriting with each left coefficient g_i resolved
    through the scalar action, contributing q^(-i) root twists.
    """
    _require_finite(module)
    g = _extract_drinfeld_g(module)
    r = len(g)
    theta = module.theta.as_fq()
    gk = [ext.embed(c.as_fq()) for c in g]
    th_k = ext.embed(theta)
    tring = _TPolyRing(ext)

    def unit_col(i):
        col = [tring.zero() for _ in range(r)]
        col[i] = tring.one()
        return col

    t_minus_theta = SPoly(ext, {1: ext.one(), 0: -th_k})

    motive_cols = [unit_col(i + 1) for i in range(r - 1)]
    g_r_inv = gk[-1].inverse()
    last = [t_minus_theta.scale(g_r_inv)]
    for s in range(1, r):
        last.append(SPoly.const(ext, -(g_r_inv * gk[s - 1])))
    motive_cols.append(last)
    motive = [[motive_cols[j][i] for j in range(r)] for i in range(r)]

    comotive_cols = [unit_col(j + 1) for j in range(r - 1)]
    g_r_root = gk[-1]
    for _ in range(r):
        g_r_root = g_r_root.frobenius_inv()
    lead_inv = g_r_root.inverse()
    last = [t_minus_theta.scale(lead_inv)]
    for s in range(1, r):
        gs = gk[s - 1]
        for _ in range(s):
            gs = gs.frobenius_inv()
        last.append(SPoly.const(ext, -(lead_inv * gs)))
    comotive_cols.append(last)
    comotive = [[comotive_cols[j][i] for j in range(r)] for i in range(r)]

    return (TauMatrix(side="motive", entries=motive),
            TauMatrix(side="comotive", entries=comotive))


def _decompose(ext: ExtField, x: ExtElement, basis_inv=None):
    """Coordinates of x in an F_q-basis of k (power basis when basis_inv
    is None, else through the inverted change-of-basis matrix)."""
    if basis_inv is None:
        return list(x.coeffs)
    coords = list(x.coeffs)
    return [_dot(row, coords, ext.base) for row in basis_inv]


def _basis_inverse(ext: ExtField, basis):
    """Invert the n x n change-of-basis matrix over F_q."""
    n = ext.n
    a = [[basis[j].coeffs[i] for j in range(n)] for i in range(n)]
    aug = [row[:] + [ext.base.one() if i == j else ext.base.zero()
                     for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise FieldError("basis of k over F_q is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def restrict_tau(tau_matrix: TauMatrix, ext: ExtField, basis=None):
    """The F_q[t]-matrix of the semilinear tau on basis (e_i b_a).

    Motive side twists scalars by q, comotive by q^(-1); either way
    tau(b_a e_i) = twist(b_a) * sum_l M[l][i] e_l, decomposed over F_q.
    The default basis is the power basis, whose coordinates are just the
    coefficient tuple.
    """
    r = tau_matrix.rank
    n = ext.n
    fq = ext.base
    basis_inv = None
    if basis is None:
        basis = [ext.element([fq.one() if i == a else fq.zero()
                              for i in range(n)]) for a in range(n)]
    else:
        if len(basis) != n:
            raise DimensionError("basis of k needs {} elements".format(n))
        basis_inv = _basis_inverse(ext, basis)
    size = r * n
    tring = _TPolyRing(fq)
    big = [[tring.zero() for _ in range(size)] for _ in range(size)]
    for i in range(r):
        for a in range(n):
            ba = basis[a]
            tw = ba.frobenius() if tau_matrix.side == "motive" \
                else ba.frobenius_inv()
            for l in range(r):
                poly = tau_matrix.entries[l][i]
                if not poly:
                    continue
                for te, c in poly.terms.items():
                    coords = _decompose(ext, tw * c, basis_inv)
                    for ap in range(n):
                        comp = coords[ap]
                        if comp:
                            cur = big[l * n + ap][i * n + a]
                            big[l * n + ap][i * n + a] = \
                                cur + SPoly(fq, {te: comp})
    return big


def fitting_ideal(module: AndersonModule, ext: ExtField, side="motive",
                  tau_matrix: TauMatrix = None, basis=None) -> BivariatePoly:
    """det(T - tau) on the chosen side after restriction of scalars:
    the monic-in-T generator of the T-deformation Fitting ideal."""
    if side not in ("motive", "comotive"):
        raise FieldError("side must be motive or comotive")
    if tau_matrix is None:
        mot, com = drinfeld_tau_matrices(module, ext)
        tau_matrix = mot if side == "motive" else com
    elif tau_matrix.side != side:
        raise FieldError("tau_matrix side marker is {}".format(
            tau_matrix.side))
    big = restrict_tau(tau_matrix, ext, basis=basis)
    fq = ext.base
    coeffs_lead_first = charpoly(big, _TPolyRing(fq))
    coeffs = list(reversed(coeffs_lead_first))
    return BivariatePoly(fq, coeffs)


def fitting_ideal_power_oracle(module: AndersonModule, ext: ExtField,
                               side="motive",
                               tau_matrix: TauMatrix = None) -> BivariatePoly:
    """Independent route: det over k[t] of (T^d - tau^d), where d = [k:F_q]
    makes tau^d k[t]-linear; the result must have F_q coefficients."""
    if tau_matrix is None:
        mot, com = drinfeld_tau_matrices(module, ext)
        tau_matrix = mot if side == "motive" else com
    r = tau_matrix.rank
    n = ext.n
    # matrix of tau^n: M * M^(tw) * .. * M^(tw^(n-1)), tw = coefficient
    # Frobenius (inverse Frobenius on the comotive side)
    def twist_poly(p, steps):
        def tw(c):
            out = c
            for _ in range(abs(steps)):
                out = out.frobenius() if steps > 0 else out.frobenius_inv()
            return out
        return p.map_coeffs(tw)

    sign = 1 if tau_matrix.side == "motive" else -1
    acc = tau_matrix.entries
    for s in range(1, n):
        twisted = [[twist_poly(tau_matrix.entries[i][j], sign * s)
                    for j in range(r)] for i in range(r)]
        tring = _TPolyRing(ext)
        acc = [[_dot(acc[i], [twisted[l][j] for l in range(r)], tring)
                for j in range(r)] for i in range(r)]
    coeffs_lead_first = charpoly(acc, _TPolyRing(ext))
    # polynomial in U = T^n with k[t] coefficients; must descend to F_q
    fq = ext.base
    out = [SPoly(fq, {}) for _ in range(n * r + 1)]
    for u_exp, c in enumerate(reversed(coeffs_lead_first)):
        terms = {}
        for te, ec in c.terms.items():
            if any(ec.coeffs[1:]):
                raise FieldError(
                    "power-oracle determinant has a coefficient outside "
                    "F_q: {}".format(ec))
            terms[te] = ec.coeffs[0]
        out[u_exp * n] = SPoly(fq, terms)
    return BivariatePoly(fq, out)


def brute_force_fitting(module: AndersonModule, ext: ExtField) -> SPoly:
    """Characteristic polynomial of the t-action on E(k) = k^dim as an
    F_q-space: the 0th Fitting ideal generator of E(k) as an A-module."""
    _require_finite(module)
    d = module.dim
    n = ext.n
    if d * n > DESK_BOUND:
        raise DimensionError(
            "E(k) dimension {} exceeds the desk bound {}".format(
                d * n, DESK_BOUND))
    fq = ext.base
    size = d * n
    basis = [ext.element([fq.one() if i == a else fq.zero()
                          for i in range(n)]) for a in range(n)]
    cols = []
    for c in range(d):
        for a in range(n):
            w_a = basis[a]
            col = [fq.zero()] * size
            for l in range(d):
                entry = module.phi_t[l, c]
                val = ext.zero()
                for i, coeff in sorted(entry.coeffs.items()):
                    term = ext.embed(coeff.as_fq()) * (w_a ** (ext.q ** i))
                    val = val + term
                for ap in range(n):
                    col[l * n + ap] = col[l * n + ap] + val.coeffs[ap]
            cols.append(col)
    mat = [[cols[j][i] for j in range(size)] for i in range(size)]
    coeffs_lead_first = charpoly(mat, fq)
    return SPoly(fq, {size - i: c for i, c in enumerate(coeffs_lead_first)
                      if c})


def poly_unit_equiv(a: SPoly, b: SPoly) -> bool:
    """Equality of F_q[t] elements up to F_q^x."""
    if set(a.terms) != set(b.terms):
        return False
    ratio = None
    for e, c in a.terms.items():
        r = c / b.terms[e]
        if ratio is None:
            ratio = r
        elif r != ratio:
            return False
    return True
