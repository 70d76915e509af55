"""Anderson module layer: axiom validation, the F_q[t]-action and its
negative powers, and the convergence constant."""

import random

import pytest

from taures.errors import FieldError
from taures.anderson import (AndersonModule, Differential, TPoly, carlitz,
                             carlitz_tensor, drinfeld, find_k1, maurischat,
                             phi_inverse_power, phi_of_poly,
                             termination_bound, validate)
from taures.skew import SkewLaurent
from taures.skewmat import SkewMatrix, invert_series_matrix, mat_mul, \
    sigma_order

from conftest import rand_fq


class TestValidate:
    def test_maurischat_passes(self, pf3):
        report = validate(maurischat(pf3, pf3.theta()))
        assert report.ok

    def test_carlitz_tensor_passes(self, pf2):
        for d in (1, 2, 4):
            assert validate(carlitz_tensor(pf2, pf2.theta(), d)).ok

    def test_non_nilpotent_fails(self, pf3):
        one = SkewLaurent.one(pf3)
        bad = AndersonModule(
            field=pf3.fq, pf=pf3, theta=pf3.theta(), dim=1,
            phi_t=SkewMatrix(pf3, [[SkewLaurent.tau(pf3)]]),
            motive_basis=[SkewMatrix(pf3, [[one]])],
            comotive_basis=[SkewMatrix(pf3, [[one]])])
        report = validate(bad)
        assert not report.ok
        assert "nilpotent" in report.failure

    def test_sigma_in_phi_fails(self, pf3):
        one = SkewLaurent.one(pf3)
        th = SkewLaurent.scalar(pf3, pf3.theta())
        bad = AndersonModule(
            field=pf3.fq, pf=pf3, theta=pf3.theta(), dim=1,
            phi_t=SkewMatrix(pf3, [[th + SkewLaurent.sigma(pf3)]]),
            motive_basis=[SkewMatrix(pf3, [[one]])],
            comotive_basis=[SkewMatrix(pf3, [[one]])])
        report = validate(bad)
        assert not report.ok
        assert "R[tau]" in report.failure

    def test_basis_length_mismatch_fails(self, pf3):
        car = carlitz(pf3, pf3.theta())
        bad = AndersonModule(
            field=pf3.fq, pf=pf3, theta=pf3.theta(), dim=1,
            phi_t=car.phi_t,
            motive_basis=car.motive_basis + car.motive_basis,
            comotive_basis=car.comotive_basis)
        report = validate(bad)
        assert not report.ok


class TestPhiOfPoly:
    def test_t_and_one(self, pf3):
        car = carlitz(pf3, pf3.theta())
        assert phi_of_poly(car, TPoly.t(pf3)) == car.phi_t
        assert phi_of_poly(car, TPoly.const(pf3, pf3.one())) == \
            SkewMatrix.identity(pf3, 1)

    def test_carlitz_t_squared(self, pf3):
        th = pf3.theta()
        car = carlitz(pf3, th)
        m = phi_of_poly(car, TPoly(pf3, {2: pf3.one()}))
        e = m[0, 0]
        assert e.coeff(0) == th * th
        assert e.coeff(1).q_pow() == th.q_pow() + th  # left coeff theta^q+theta
        assert e.coeff(2).is_one()

    def test_ring_homomorphism(self, pf2, pf3):
        rng = random.Random(41)
        for pf in (pf2, pf3):
            E = carlitz_tensor(pf, pf.theta(), 2)
            for _ in range(10):
                a = TPoly(pf, {e: pf.from_fq(rand_fq(rng, pf.fq))
                               for e in range(rng.randint(1, 4))})
                b = TPoly(pf, {e: pf.from_fq(rand_fq(rng, pf.fq))
                               for e in range(rng.randint(1, 4))})
                left = phi_of_poly(E, a * b)
                right = mat_mul(phi_of_poly(E, a), phi_of_poly(E, b))
                assert left == right
                assert phi_of_poly(E, a + b) == \
                    phi_of_poly(E, a) + phi_of_poly(E, b)

    def test_rejects_non_constant_coefficients(self, pf3):
        car = carlitz(pf3, pf3.theta())
        bad = TPoly(pf3, {1: pf3.theta()})
        with pytest.raises(FieldError):
            phi_of_poly(car, bad)


class TestPhiInversePower:
    def test_round_trips(self, pf3):
        E = carlitz(pf3, pf3.theta())
        eye = SkewMatrix.identity(pf3, 1)
        for k in (1, 2, 3, 4):
            inv_k = phi_inverse_power(E, k, 4)
            tk = phi_of_poly(E, TPoly(pf3, {k: pf3.one()}))
            assert mat_mul(tk, inv_k).agrees_with(eye)
            assert mat_mul(inv_k, tk).agrees_with(eye)

    def test_tensor_c0_sigma_d(self, pf3):
        E = carlitz_tensor(pf3, pf3.theta(), 3)
        inv = phi_inverse_power(E, 1, 3)
        assert mat_mul(E.phi_t, inv).agrees_with(
            SkewMatrix.identity(pf3, 3))


class TestFindK1:
    def test_drinfeld_is_one(self, pf3):
        rng = random.Random(42)
        for r in (1, 2, 3):
            g = [pf3.from_fq(rand_fq(rng, pf3.fq)) for _ in range(r - 1)]
            g.append(pf3.theta())
            E = drinfeld(pf3, pf3.theta(), g)
            assert find_k1(E) == 1

    def test_tensor_is_d(self, pf2, pf3):
        for pf in (pf2, pf3):
            for d in (1, 2, 3, 4, 5):
                assert find_k1(carlitz_tensor(pf, pf.theta(), d)) == d

    def test_maurischat_frozen(self, pf2, pf3):
        # regression: the search finds 2 (and stays under the bound 3)
        for pf in (pf2, pf3):
            k1 = find_k1(maurischat(pf, pf.theta()))
            assert k1 == 2
            assert k1 <= 3

    def test_minimality(self, pf3):
        for d in (2, 3):
            E = carlitz_tensor(pf3, pf3.theta(), d)
            k1 = find_k1(E)
            inv = invert_series_matrix(E.phi_t, 3)
            acc = inv
            for _ in range(k1 - 2):
                acc = mat_mul(acc, inv)
            assert sigma_order(acc) <= 0

    def test_cap_error(self, pf3):
        from taures.errors import ConvergenceError
        E = carlitz_tensor(pf3, pf3.theta(), 4)
        with pytest.raises(ConvergenceError):
            find_k1(E, cap=2)


class TestTermination:
    def test_bounds(self, pf3):
        th = pf3.theta()
        assert termination_bound(carlitz(pf3, th), 1) == 2
        assert termination_bound(carlitz_tensor(pf3, th, 4), 4) == 8
        mau = maurischat(pf3, th)
        assert termination_bound(mau, find_k1(mau)) == 8


class TestTPoly:
    def test_arithmetic(self, pf3):
        th = pf3.theta()
        t = TPoly.t(pf3)
        a = t * t + TPoly.const(pf3, th)
        b = t - TPoly.const(pf3, pf3.one())
        assert (a * b).coeff(3).is_one()
        assert (a - a) == TPoly.zero(pf3)
        assert a.twist(1).coeff(0) == th.q_pow()
        assert a.twist(1).coeff(2).is_one()

    def test_render(self, pf3):
        th = pf3.theta()
        g = TPoly(pf3, {0: th.q_pow() + th, 1: -(pf3.from_int(2))})
        assert str(g) == "t + theta^3 + theta"
        assert str(Differential(g)) == "t + theta^3 + theta dt"
        assert str(TPoly.zero(pf3)) == "0"
