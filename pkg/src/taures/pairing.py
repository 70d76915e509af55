"""The residue-in-tau pairing and everything certified from it.

The pairing of a motive row m against a comotive column n is computed
through the explicit expansion over the projective line,

    pair(m, n) = - sum_{k=1..K} coeff_0(tau * m * phi(t)^-k * n) t^(k-1) dt,

cut at the certified bound K = k1*(2 + deg m + deg n): past it every
summand's tau-degree is negative, so coeff_0 vanishes.  Every coefficient
is extracted from a floor-verified product; precision shortfalls escalate
internally and only surface after three retries.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionError, FieldError, PrecisionError
from .anderson import (AndersonModule, Differential, TPoly, find_k1,
                       termination_bound, validate)
from .skew import NEG_INF, SkewLaurent
from .skewmat import SkewMatrix, invert_series_matrix, mat_mul

MAX_ESCALATIONS = 3


def _deg_or_zero(mat: SkewMatrix) -> int:
    d = mat.max_deg_tau()
    return 0 if d == NEG_INF else int(max(d, 0))


class PairingContext:
    """Shared, immutable data for pairing sums over one module: the
    convergence constant k1, the cut-off for the declared bases, and a
    truncated phi(t)^-1 deep enough for them."""

    def __init__(self, module: AndersonModule, k_cap=64, precision_cap=4096):
        report = validate(module)
        if not report.ok:
            raise FieldError("module does not validate: " + report.failure)
        self.module = module
        self.k1 = find_k1(module, cap=k_cap)
        self.k_cutoff = termination_bound(module, self.k1)
        self.precision_cap = precision_cap
        dm, dn = module.max_basis_deg()
        self._precision = dm + dn + 2
        self._inv = invert_series_matrix(module.phi_t, self._precision)

    def inverse_at(self, precision):
        if precision > self.precision_cap:
            raise PrecisionError(
                "needed sigma-precision {} exceeds cap {}".format(
                    precision, self.precision_cap))
        if -self._inv.max_floor() < precision:
            self._inv = invert_series_matrix(self.module.phi_t, precision)
            self._precision = precision
        return self._inv


def _check_morphism(mat: SkewMatrix, rows, cols, what):
    if mat.rows != rows or mat.cols != cols:
        raise DimensionError(
            "{} must be {}x{}, got {}x{}".format(what, rows, cols,
                                                 mat.rows, mat.cols))
    if not (mat.sigma_free() and mat.is_exact()):
        raise FieldError("{} must lie in R[tau]".format(what))


def residue_pair(module_or_ctx, m: SkewMatrix, n: SkewMatrix,
                 extra_terms=0) -> Differential:
    """Pair a motive element (1 x d row) with a comotive element (d x 1
    column), both over R[tau]."""
    ctx = module_or_ctx if isinstance(module_or_ctx, PairingContext) \
        else PairingContext(module_or_ctx)
    module = ctx.module
    d = module.dim
    _check_morphism(m, 1, d, "motive element")
    _check_morphism(n, d, 1, "comotive element")

    deg_m = _deg_or_zero(m)
    deg_n = _deg_or_zero(n)
    k_cut = max(ctx.k_cutoff, ctx.k1 * (2 + deg_m + deg_n)) + extra_terms

    precision = deg_m + deg_n + 2
    last_err = None
    for _ in range(MAX_ESCALATIONS + 1):
        try:
            return _pair_sum(ctx, m, n, k_cut, precision)
        except PrecisionError as err:
            last_err = err
            precision *= 2
    raise last_err


def _pair_sum(ctx, m, n, k_cut, precision):
    return _pair_row(ctx, m, [n], k_cut, precision)[0]


def _pair_row(ctx, m, ns, k_cut, precision):
    """Pair one motive row against several comotive columns, sharing the
    k-power chain tau*m*phi(t)^-k across the columns.

    Only acc-coefficients at tau-exponent >= -deg(n) can reach coeff_0
    (the inverse matrix has non-positive degree, n non-negative), so the
    chain is truncated to that window each step; the precision floors
    certify every extracted coefficient exact.
    """
    pf = ctx.module.pf
    inv = ctx.inverse_at(precision)
    window = -max(_deg_or_zero(n) for n in ns)
    tau_row = m.map(lambda e: SkewLaurent.tau(pf) * e)
    acc = mat_mul(tau_row, inv).truncate(window)
    terms = [{} for _ in ns]
    for k in range(1, k_cut + 1):
        for idx, n in enumerate(ns):
            val = mat_mul(acc, n)[0, 0]
            c = val.coeff(0)  # raises PrecisionError if floor is above 0
            if c:
                terms[idx][k - 1] = -c
        if k < k_cut:
            acc = mat_mul(acc, inv).truncate(window)
    return [Differential(TPoly(pf, t)) for t in terms]


@dataclass
class GramMatrix:
    """All pairings of the declared bases, with the cut-off used and the
    perfection depth of the coefficients."""

    entries: list  # r x r nested list of Differential
    k_cutoff: int
    b_level: int

    @property
    def rank(self):
        return len(self.entries)

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def poly_matrix(self):
        return [[e.poly for e in row] for row in self.entries]

    def render(self):
        lines = [" | ".join(str(e.poly) for e in row) + " dt"
                 for row in self.entries]
        cert = check_perfectness(self)
        footer = "K = {}, b = {}, det = {}, perfect = {}".format(
            self.k_cutoff, self.b_level, cert.det,
            "yes" if cert.status == "perfect" else "no")
        return "\n".join(lines + [footer])

    def __str__(self):
        return self.render()


def gram(module_or_ctx, extra_terms=0) -> GramMatrix:
    """The r x r matrix of pairings of declared motive x comotive bases."""
    ctx = module_or_ctx if isinstance(module_or_ctx, PairingContext) \
        else PairingContext(module_or_ctx)
    module = ctx.module
    d = module.dim
    for b in module.motive_basis:
        _check_morphism(b, 1, d, "motive basis element")
    for b in module.comotive_basis:
        _check_morphism(b, d, 1, "comotive basis element")
    k_cut = ctx.k_cutoff + extra_terms
    dm, dn = module.max_basis_deg()
    precision = dm + dn + 2
    entries = None
    last_err = None
    for _ in range(MAX_ESCALATIONS + 1):
        try:
            entries = [_pair_row(ctx, m, module.comotive_basis, k_cut,
                                 precision)
                       for m in module.motive_basis]
            break
        except PrecisionError as err:
            last_err = err
            precision *= 2
    if entries is None:
        raise last_err
    b_level = max((e.max_level() for row in entries for e in row), default=0)
    return GramMatrix(entries=entries, k_cutoff=k_cut, b_level=b_level)


def expand_sesquilinear(g: GramMatrix, a, b) -> Differential:
    """Pair sum_i a_i e_i against sum_j b_j e-check_j through the Gram
    matrix: motive coordinates receive the q-power twist."""
    r = g.rank
    if len(a) != r or len(b) != r:
        raise DimensionError(
            "coordinate vectors must have length {}".format(r))
    pf = g.entries[0][0].poly.pf
    acc = TPoly.zero(pf)
    for i in range(r):
        ai = a[i].twist(1)
        if not ai:
            continue
        for j in range(r):
            if not b[j]:
                continue
            acc = acc + ai * g.entries[i][j].poly * b[j]
    return Differential(acc)


def check_tau_commutation(module_or_ctx, m: SkewMatrix,
                          n: SkewMatrix) -> bool:
    """Verify pair(tau o m, n) == twist(pair(m, n o tau)) exactly."""
    ctx = module_or_ctx if isinstance(module_or_ctx, PairingContext) \
        else PairingContext(module_or_ctx)
    pf = ctx.module.pf
    tau = SkewLaurent.tau(pf)
    m_tau = m.map(lambda e: tau * e)
    n_tau = n.map(lambda e: e * tau)
    left = residue_pair(ctx, m_tau, n)
    right = residue_pair(ctx, m, n_tau).twist(1)
    return left == right


@dataclass
class PerfectnessResult:
    status: str  # "perfect" | "not-certified"
    det: TPoly

    def __bool__(self):
        return self.status == "perfect"


def check_perfectness(g: GramMatrix) -> PerfectnessResult:
    """The pairing restricted to the declared spans is perfect iff the
    Gram determinant is a unit of R^perf[t], i.e. a nonzero t-constant."""
    mat = g.poly_matrix()
    d = det_poly_matrix(mat)
    ok = bool(d) and d.is_constant()
    return PerfectnessResult(status="perfect" if ok else "not-certified",
                             det=d)


def det_poly_matrix(mat):
    """Cofactor-expansion determinant over the commutative ring R^perf[t];
    ranks here are desk-scale."""
    n = len(mat)
    if n == 0:
        raise DimensionError("empty matrix")
    pf = mat[0][0].pf
    if n == 1:
        return mat[0][0]
    acc = TPoly.zero(pf)
    for j in range(n):
        entry = mat[0][j]
        if not entry:
            continue
        minor = [[mat[i][jj] for jj in range(n) if jj != j]
                 for i in range(1, n)]
        term = entry * det_poly_matrix(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def adjugate_poly_matrix(mat):
    n = len(mat)
    pf = mat[0][0].pf
    if n == 1:
        return [[TPoly.const(pf, pf.one())]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[mat[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            cof = det_poly_matrix(minor)
            if (i + j) % 2:
                cof = -cof
            adj[j][i] = cof
    return adj


def pairing_inverse(g: GramMatrix, eta):
    """Solve G b = eta for the comotive coordinates b over R^perf[t].

    Requires the Gram certificate; the determinant is then a unit constant
    and the adjugate gives the exact inverse."""
    cert = check_perfectness(g)
    if not cert:
        raise FieldError("gram matrix is not certified perfect")
    r = g.rank
    if len(eta) != r:
        raise DimensionError("eta must have length {}".format(r))
    mat = g.poly_matrix()
    adj = adjugate_poly_matrix(mat)
    det_c = cert.det.coeff(0)
    pf = cert.det.pf
    inv_det = pf.one() / det_c
    out = []
    for i in range(r):
        acc = TPoly.zero(pf)
        for j in range(r):
            eta_j = eta[j].poly if isinstance(eta[j], Differential) else eta[j]
            acc = acc + adj[i][j] * eta_j
        out.append(acc.scale(inv_det))
    return out


def measure_b(g: GramMatrix) -> int:
    """Max perfection level over all Gram coefficients: the measured depth
    of q-th roots the pairing values need."""
    return g.b_level


def drinfeld_closed_form(pf, r, g, i, j) -> Differential:
    """Closed form for rank-r Drinfeld pairings of tau^i against tau^j.

    Finite sum over compositions v_1+..+v_n = 1+i+j-r with parts in
    {1..r} and n >= 0; the empty composition contributes the bare -1
    term, and the result is 0 when the target is negative.
    """
    if not (0 <= i < r and 0 <= j < r):
        raise DimensionError("indices must satisfy 0 <= i, j < r")
    g = list(g)
    if len(g) != r or not g[-1]:
        raise FieldError("need g_1..g_r with g_r != 0")
    target = 1 + i + j - r
    if target < 0:
        return Differential(TPoly.zero(pf))
    g_r = g[-1]
    acc = pf.zero()
    for comp in _compositions(target, r):
        n = len(comp)
        term = pf.one()
        suffix = sum(comp)
        for v in comp:
            ratio = g[r - v - 1] / g_r  # g_{r-v} with 1-based g list
            term = term * ratio.q_power_iter(suffix - j)
            suffix -= v
        if n % 2 == 0:
            term = -term  # (-1)^(n+1)
        acc = acc + term
    acc = acc * (pf.one() / g_r).q_power_iter(-j)
    return Differential(TPoly.const(pf, acc))


def _compositions(total, max_part):
    if total == 0:
        yield ()
        return
    for first in range(1, min(max_part, total) + 1):
        for rest in _compositions(total - first, max_part):
            yield (first,) + rest
