"""Matrices over the twisted Laurent ring, and inversion into truncated
series matrices by Gaussian elimination over the division ring R((sigma)).

Row operations multiply from the left throughout, so the noncommutative
order of scalars is preserved.  Pivoting picks the entry of maximal
deg_tau (minimal sigma-valuation) in the current column, breaking ties by
smallest row index, which keeps golden outputs deterministic.
"""

from __future__ import annotations

from .errors import DimensionError, NotInvertibleError, PrecisionError
from .fields import PerfField
from .skew import NEG_INF, SkewLaurent, invert_scalar


class SkewMatrix:
    """Dense matrix of SkewLaurent entries (immutable by convention)."""

    __slots__ = ("pf", "rows", "cols", "entries")

    def __init__(self, pf: PerfField, entries):
        self.pf = pf
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        for row in self.entries:
            if len(row) != self.cols:
                raise DimensionError("ragged matrix rows")

    @classmethod
    def identity(cls, pf, n):
        one = SkewLaurent.one(pf)
        zero = SkewLaurent.zero(pf)
        return cls(pf, [[one if i == j else zero for j in range(n)]
                        for i in range(n)])

    @classmethod
    def zeros(cls, pf, rows, cols):
        zero = SkewLaurent.zero(pf)
        return cls(pf, [[zero for _ in range(cols)] for _ in range(rows)])

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def __eq__(self, other):
        return (isinstance(other, SkewMatrix) and self.rows == other.rows
                and self.cols == other.cols
                and all(self.entries[i][j] == other.entries[i][j]
                        for i in range(self.rows) for j in range(self.cols)))

    def map(self, f):
        return SkewMatrix(self.pf, [[f(e) for e in row]
                                    for row in self.entries])

    def __add__(self, other):
        self._check_same_shape(other)
        return SkewMatrix(self.pf,
                          [[a + b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check_same_shape(other)
        return SkewMatrix(self.pf,
                          [[a - b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)])

    def _check_same_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionError("matrix shapes differ")

    def __mul__(self, other):
        return mat_mul(self, other)

    def transpose(self):
        return SkewMatrix(self.pf, [[self.entries[i][j]
                                     for i in range(self.rows)]
                                    for j in range(self.cols)])

    def agrees_with(self, other) -> bool:
        self._check_same_shape(other)
        return all(self.entries[i][j].agrees_with(other.entries[i][j])
                   for i in range(self.rows) for j in range(self.cols))

    def truncate(self, floor):
        return self.map(lambda e: e.truncate(floor))

    def max_floor(self):
        """Worst (highest) precision floor over entries; -inf if all exact."""
        worst = NEG_INF
        for row in self.entries:
            for e in row:
                worst = max(worst, e.floor_value())
        return worst

    def is_exact(self):
        return all(e.is_exact() for row in self.entries for e in row)

    def sigma_free(self):
        return all(e.sigma_free() for row in self.entries for e in row)

    def max_deg_tau(self):
        d = NEG_INF
        for row in self.entries:
            for e in row:
                d = max(d, e.deg_tau())
        return d

    def max_level(self):
        return max((e.max_level() for row in self.entries for e in row),
                   default=0)

    def render(self):
        return "\n".join(" | ".join(str(e) for e in row)
                         for row in self.entries)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return "SkewMatrix({}x{})".format(self.rows, self.cols)


def mat_mul(a: SkewMatrix, b: SkewMatrix) -> SkewMatrix:
    """Entry-wise sums of skew products; a's entries multiply from the left."""
    if a.cols != b.rows:
        raise DimensionError(
            "inner dimensions differ: {}x{} times {}x{}".format(
                a.rows, a.cols, b.rows, b.cols))
    pf = a.pf
    out = []
    for i in range(a.rows):
        row = []
        for j in range(b.cols):
            acc = SkewLaurent.zero(pf)
            for l in range(a.cols):
                acc = acc + a.entries[i][l] * b.entries[l][j]
            row.append(acc)
        out.append(row)
    return SkewMatrix(pf, out)


def sigma_order(a: SkewMatrix):
    """min over entries of (-deg_tau); +inf for the zero matrix.

    For truncated entries with no stored terms the actual degree sits
    strictly below the floor, so 1 - floor is a sound lower bound.
    """
    order = float("inf")
    for row in a.entries:
        for e in row:
            d = e.deg_tau()
            if d == NEG_INF:
                if e.floor is not None:
                    order = min(order, 1 - e.floor)
            else:
                order = min(order, -d)
    return order


def invert_series_matrix(phi: SkewMatrix, precision,
                         max_retries=3) -> SkewMatrix:
    """Invert a square matrix over R[tau] into Mat(R((sigma))).

    Returns X with every entry carrying prec_floor <= -precision and
    phi*X == I == X*phi to the precision the product floors certify.
    Internal scalar divisions run at a working precision derived from the
    entry degrees; if the target floor is not reached the working precision
    escalates (up to ``max_retries`` retries) before giving up.
    """
    if phi.rows != phi.cols:
        raise DimensionError("only square matrices can be inverted")
    if precision < 1:
        raise PrecisionError("inversion precision must be >= 1")
    work = precision
    last_err = None
    for _ in range(max_retries + 1):
        try:
            x = _eliminate(phi, work)
        except PrecisionError as err:
            last_err = err
            work *= 2
            continue
        deficit = x.max_floor() + precision
        if deficit <= 0:
            return x.truncate(-precision)
        # escalate by exactly the missing depth; coefficient degrees grow
        # fast with sigma-precision, so overshooting is the real hazard
        work += int(deficit) + 1
        last_err = PrecisionError(
            "inverse floor {} did not reach -{}".format(
                x.max_floor(), precision))
    raise last_err


def _eliminate(phi: SkewMatrix, work):
    n = phi.rows
    pf = phi.pf
    a = [row[:] for row in phi.entries]
    x = [row[:] for row in SkewMatrix.identity(pf, n).entries]
    for col in range(n):
        pivot = None
        best = NEG_INF
        for r in range(col, n):
            d = a[r][col].deg_tau()
            if d != NEG_INF and d > best:
                best = d
                pivot = r
        if pivot is None:
            raise NotInvertibleError(
                "not invertible to precision: column {} vanishes to the "
                "working floor".format(col))
        if pivot != col:
            a[pivot], a[col] = a[col], a[pivot]
            x[pivot], x[col] = x[col], x[pivot]
        pivot_entry = a[col][col]
        if pivot_entry.floor is None:
            p_eff = work
        else:
            # a truncated pivot only supports inversion to the depth it
            # is known; floors on the output keep the accounting honest
            p_eff = min(work, int(pivot_entry.deg_tau())
                        - pivot_entry.floor + 1)
        inv = invert_scalar(pivot_entry, p_eff)
        a[col] = [inv * e for e in a[col]]
        x[col] = [inv * e for e in x[col]]
        for r in range(n):
            if r == col:
                continue
            factor = a[r][col]
            if not factor and factor.is_exact():
                continue
            a[r] = [e - factor * p for e, p in zip(a[r], a[col])]
            x[r] = [e - factor * p for e, p in zip(x[r], x[col])]
    return SkewMatrix(pf, x)
