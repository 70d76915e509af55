"""Shared fixtures and random-instance generators for the test suite.

Randomized suites use seeded random.Random so every run exercises the
same cases; the operator-evaluation helper gives an implementation-free
semantics for skew products (compose twisted multiplication maps).
"""

import pytest

from taures.fields import Fq, PerfField
from taures.skew import SkewLaurent


@pytest.fixture(scope="session")
def fq2():
    return Fq(2)


@pytest.fixture(scope="session")
def fq3():
    return Fq(3)


@pytest.fixture(scope="session")
def fq4():
    return Fq(4, [1, 1, 1])


@pytest.fixture(scope="session")
def pf2(fq2):
    return PerfField(fq2)


@pytest.fixture(scope="session")
def pf3(fq3):
    return PerfField(fq3)


@pytest.fixture(scope="session")
def pf4(fq4):
    return PerfField(fq4)


def rand_fq(rng, fq):
    return fq.element([rng.randrange(fq.p) for _ in range(fq.m)])


def rand_perf(rng, pf, max_deg=1, max_level=1, allow_fraction=False):
    """Random element of the perfection: a small polynomial (or fraction)
    in theta, possibly tagged with a q-th root level."""
    from taures.fields import SPoly
    fq = pf.fq
    num = SPoly(fq, {e: rand_fq(rng, fq) for e in range(max_deg + 1)})
    if not num:
        num = SPoly.const(fq, fq.one())
    den = SPoly.const(fq, fq.one())
    if allow_fraction and rng.random() < 0.3:
        den = SPoly(fq, {rng.randrange(2): fq.one()})
        if not den:
            den = SPoly.const(fq, fq.one())
    from taures.fields import PerfElement
    val = PerfElement(pf, num, den, 0)
    for _ in range(rng.randrange(max_level + 1)):
        val = val.q_root()
    return val


def rand_perf_nonzero(rng, pf, **kw):
    for _ in range(50):
        val = rand_perf(rng, pf, **kw)
        if val:
            return val
    return pf.one()


def rand_skew(rng, pf, lo=-4, hi=4, max_terms=3, **kw):
    """Random exact twisted Laurent element with exponents in [lo, hi]."""
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        e = rng.randint(lo, hi)
        terms[e] = rand_perf(rng, pf, **kw)
    return SkewLaurent(pf, terms)


def rand_skew_nonzero(rng, pf, **kw):
    for _ in range(50):
        f = rand_skew(rng, pf, **kw)
        if f:
            return f
    return SkewLaurent.one(pf)


def rand_skew_monomial_lead(rng, pf, lo=-2, hi=2, **kw):
    """Random nonzero element whose leading coefficient is a theta-power
    monomial: inversion denominators stay monomial, so deep precisions
    remain desk-cheap (binomial leads cost exponentially in precision)."""
    f = rand_skew(rng, pf, lo=lo, hi=hi, **kw)
    d = int(f.deg_tau()) if f else rng.randint(lo, hi)
    c = rand_fq(rng, pf.fq)
    if not c:
        c = pf.fq.one()
    lead = pf.from_fq(c) * (pf.theta() ** rng.randrange(3))
    terms = [(coeff, e) for e, coeff in f.coeffs.items() if e != d]
    terms.append((lead, d))
    return SkewLaurent.from_right_coeffs(pf, terms)


def apply_skew(f, x):
    """Operator semantics: (sum_i tau^i a_i)(x) = sum_i (a_i x)^(q^i).

    Negative i takes q-th roots; this is the composition semantics the
    ring multiplication must match.
    """
    pf = f.pf
    acc = pf.zero()
    for e, a in f.coeffs.items():
        acc = acc + (a * x).q_power_iter(e)
    return acc
