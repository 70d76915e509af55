"""Expression grammar and manifest parsing, with located diagnostics."""

import pytest

from taures.errors import SkewParseError
from taures.anderson import validate
from taures.parsing import (manifest_ext_field, manifest_tau_matrix,
                            parse_manifest, parse_skew_expr, parse_skew_row)


class TestSkewExpr:
    def test_tau_theta_order(self, pf3):
        th = pf3.theta()
        right = parse_skew_expr("tau * theta", pf3)
        assert right.coeff(1) == th
        left = parse_skew_expr("theta * tau", pf3)
        assert left.coeff(1) == th.q_root()
        assert right != left

    def test_square_expansion(self, pf3):
        th = pf3.theta()
        f = parse_skew_expr("(theta + tau)^2", pf3)
        assert f.coeff(0) == th * th
        assert f.coeff(1).q_pow() == th.q_pow() + th
        assert f.coeff(2).is_one()

    def test_sigma(self, pf3):
        f = parse_skew_expr("sigma^2 * theta", pf3)
        assert f.coeff(-2) == pf3.theta()

    def test_integer_literals_reduce(self, pf3):
        f = parse_skew_expr("4", pf3)
        assert f.coeff(0) == pf3.one()

    def test_z_needs_modulus(self, pf3, pf4):
        with pytest.raises(SkewParseError):
            parse_skew_expr("z + 1", pf3)
        f = parse_skew_expr("z^2 + z", pf4)
        z = pf4.from_fq(pf4.fq.gen())
        assert f.coeff(0) == z * z + z

    def test_division_scalar_only(self, pf3):
        f = parse_skew_expr("(theta^2 + 1)/theta", pf3)
        th = pf3.theta()
        assert f.coeff(0) == (th * th + pf3.one()) / th
        with pytest.raises(SkewParseError) as err:
            parse_skew_expr("tau / 2", pf3)
        assert "tau/sigma-free" in str(err.value)
        with pytest.raises(SkewParseError):
            parse_skew_expr("1 / (theta - theta)", pf3)

    def test_precedence(self, pf3):
        th = pf3.theta()
        f = parse_skew_expr("theta + theta * theta^2", pf3)
        assert f.coeff(0) == th + th ** 3

    def test_syntax_errors_carry_location(self, pf3):
        with pytest.raises(SkewParseError) as err:
            parse_skew_expr("theta + ", pf3)
        assert err.value.line == 1 and err.value.col == 9
        with pytest.raises(SkewParseError) as err:
            parse_skew_expr("theta ^ tau", pf3)
        assert "exponent" in str(err.value)
        with pytest.raises(SkewParseError) as err:
            parse_skew_expr("frobenius", pf3)
        assert "unknown name" in str(err.value)
        with pytest.raises(SkewParseError) as err:
            parse_skew_expr("theta theta", pf3)
        assert "trailing" in str(err.value)

    def test_row_split(self, pf3):
        row = parse_skew_row("theta + tau^2 | tau^3", pf3)
        assert len(row) == 2
        assert row[0].coeff(2).is_one()
        assert row[1].coeff(3).is_one()


MAURISCHAT_MANIFEST = """\
q: 3
base: perf-rational
dim: 2
rank: 3
phi_t:
row: theta + tau^2 | tau^3
row: 1 + tau | theta + tau^2
motive_basis:
row: 0 | tau
row: 0 | 1
row: 1 | 0
comotive_basis:
col: tau | 0
col: 1 | 0
col: 0 | 1
"""


class TestManifest:
    def test_maurischat_parses_and_validates(self):
        man = parse_manifest(MAURISCHAT_MANIFEST)
        assert man.q == 3 and man.dim == 2 and man.rank == 3
        report = validate(man.module)
        assert report.ok

    def test_sigma_in_phi_rejected(self):
        text = MAURISCHAT_MANIFEST.replace("row: 1 + tau |",
                                           "row: sigma |")
        with pytest.raises(SkewParseError) as err:
            parse_manifest(text)
        assert "R[tau]" in str(err.value)
        assert err.value.line == 7

    def test_q4_with_modulus(self):
        text = """\
q: 4
modulus: z^2 + z + 1
base: perf-rational
dim: 1
phi_t:
row: theta + z*tau
motive_basis:
row: 1
comotive_basis:
col: 1
"""
        man = parse_manifest(text)
        assert man.field.q == 4
        z = man.pf.from_fq(man.field.gen())
        assert man.module.phi_t[0, 0].coeff(1) == z.q_root()

    def test_reducible_modulus_diagnostic(self):
        text = "q: 4\nmodulus: z^2 + 1\nbase: perf-rational\ndim: 1\n" \
               "phi_t:\nrow: theta + tau\nmotive_basis:\nrow: 1\n" \
               "comotive_basis:\ncol: 1\n"
        with pytest.raises(SkewParseError) as err:
            parse_manifest(text)
        assert err.value.line == 2

    def test_basis_length_mismatch(self):
        text = MAURISCHAT_MANIFEST.replace("col: 0 | 1\n", "")
        with pytest.raises(SkewParseError) as err:
            parse_manifest(text)
        assert "comotive" in str(err.value)

    def test_row_width_mismatch(self):
        text = MAURISCHAT_MANIFEST.replace("row: 1 + tau | theta + tau^2",
                                           "row: 1 + tau")
        with pytest.raises(SkewParseError) as err:
            parse_manifest(text)
        assert err.value.line == 7

    def test_unknown_key(self):
        with pytest.raises(SkewParseError) as err:
            parse_manifest("q: 3\nbogus: 1\n")
        assert "unknown key" in str(err.value)
        assert err.value.line == 2

    def test_duplicate_key(self):
        with pytest.raises(SkewParseError):
            parse_manifest("q: 3\nq: 5\n")

    def test_finite_field_base(self):
        text = """\
q: 2
base: finite-field
theta: 0
dim: 1
phi_t:
row: theta + tau
motive_basis:
row: 1
comotive_basis:
col: 1
"""
        man = parse_manifest(text)
        assert not man.module.theta
        assert man.module.theta.is_constant()

    def test_finite_field_needs_theta(self):
        text = "q: 2\nbase: finite-field\ndim: 1\nphi_t:\nrow: tau\n" \
               "motive_basis:\nrow: 1\ncomotive_basis:\ncol: 1\n"
        with pytest.raises(SkewParseError) as err:
            parse_manifest(text)
        assert "theta" in str(err.value)

    def test_comments_and_blank_lines(self):
        text = MAURISCHAT_MANIFEST.replace("dim: 2",
                                           "dim: 2  # two copies\n")
        man = parse_manifest(text)
        assert man.dim == 2

    def test_ext_fields(self):
        text = MAURISCHAT_MANIFEST + "ext_degree: 2\n"
        man = parse_manifest(text)
        ext = manifest_ext_field(man)
        assert ext.n == 2

        text2 = MAURISCHAT_MANIFEST + "ext_modulus: w^2 + 2*w + 1\n"
        man2 = parse_manifest(text2)
        with pytest.raises(SkewParseError) as err:
            # (w+1)^2 is reducible
            manifest_ext_field(man2)

    def test_tau_matrix_block(self):
        text = """\
q: 2
base: finite-field
theta: 0
dim: 2
phi_t:
row: theta | 1
row: tau | theta
motive_basis:
row: 1 | 0
comotive_basis:
col: 0 | 1
tau_matrix_motive:
row: t^2
"""
        man = parse_manifest(text)
        from taures.parsing import ext_field_of_degree
        ext = ext_field_of_degree(man.field, 1)
        tm = manifest_tau_matrix(man, "motive", ext)
        assert tm.side == "motive"
        assert tm.entries[0][0].degree() == 2


class TestRoundTrip:
    def test_registry_round_trips(self):
        from taures.cli import (render_manifest, example_carlitz,
                                example_carlitz_tensor, example_drinfeld,
                                example_maurischat)
        mans = [example_carlitz(2), example_carlitz(4),
                example_carlitz_tensor(2, 3), example_carlitz_tensor(3, 5),
                example_maurischat(3), example_drinfeld(3, 3, seed=11)]
        for man in mans:
            text = render_manifest(man)
            parsed = parse_manifest(text)
            assert render_manifest(parsed) == text
            assert validate(parsed.module).ok
