import itertools
import math
from fractions import Fraction

import pytest

import tsirelson as t
from tsirelson.errors import IrrationalInRationalMode, ParseError
from tsirelson.spaces import PRODUCT, SUM, parse_explicit_file, theta_sup_from


def exhaustive_regularized(values, mode, n, max_terms=6):
    """Oracle: enumerate all index combinations with bounded term count."""
    best = None
    indices = range(1, len(values) + 1)
    for length in range(1, max_terms + 1):
        for combo in itertools.product(indices, repeat=length):
            total = sum(combo) if mode == SUM else math.prod(combo)
            if total < n:
                continue
            prod = math.prod(values[i - 1] for i in combo)
            if best is None or prod > best:
                best = prod
    return best


class TestTheta:
    def test_geometric(self):
        assert t.theta(t.Geometric(Fraction(1, 2)), 3) == Fraction(1, 8)

    def test_log_reciprocal_exact_at_powers_of_two(self):
        assert t.theta(t.LogReciprocal(), 3) == Fraction(1, 2)
        with pytest.raises(IrrationalInRationalMode):
            t.theta(t.LogReciprocal(), 2)
        assert abs(t.theta(t.LogReciprocal(), 2, "float64") - 1 / math.log2(3)) < 1e-15

    def test_explicit_tail(self):
        seq = t.ExplicitSeq((Fraction(1, 2), Fraction(3, 10)), Fraction(1, 2))
        assert t.theta(seq, 3) == Fraction(3, 20)

    def test_powerlaw_rational_only_for_perfect_powers(self):
        seq = t.PowerLaw(2)
        assert t.theta(seq, 4) == Fraction(1, 2)
        with pytest.raises(IrrationalInRationalMode):
            t.theta(seq, 3)

    def test_constructor_validation(self):
        with pytest.raises(ValueError):
            t.Geometric(Fraction(3, 2))
        with pytest.raises(ValueError):
            t.PowerLaw(1)
        with pytest.raises(ValueError):
            t.ExplicitSeq((), Fraction(1, 2))

    def test_tail_sup(self):
        seq = t.ExplicitSeq((Fraction(1, 10), Fraction(1, 2)), Fraction(1, 2))
        assert theta_sup_from(seq, 1, "rational") == Fraction(1, 2)
        assert theta_sup_from(seq, 3, "rational") == Fraction(1, 4)


class TestRegularize:
    def test_geometric_sum_mode_is_power(self):
        values = t.regularize(t.Geometric(Fraction(1, 2)), SUM, 6)
        assert values == [Fraction(1, 2) ** n for n in range(1, 7)]

    def test_explicit_examples(self):
        seq = t.ExplicitSeq((Fraction(1, 2), Fraction(3, 10)), Fraction(1, 2))
        assert t.regularize(seq, SUM, 2) == [Fraction(1, 2), Fraction(3, 10)]
        seq2 = t.ExplicitSeq((Fraction(3, 5), Fraction(1, 5)), Fraction(1, 2))
        assert t.regularize(seq2, SUM, 2)[1] == Fraction(9, 25)

    @pytest.mark.parametrize("mode", [SUM, PRODUCT])
    def test_matches_exhaustive_oracle(self, mode):
        seq = t.ExplicitSeq(
            (Fraction(1, 2), Fraction(2, 5), Fraction(1, 3), Fraction(3, 10)),
            Fraction(1, 2),
        )
        horizon = 4
        got = t.regularize(seq, mode, horizon)
        values = [t.theta(seq, n) for n in range(1, 2 * horizon)]
        for n in range(1, horizon + 1):
            expected = exhaustive_regularized(values, mode, n, max_terms=5)
            assert got[n - 1] == expected, (mode, n)

    @pytest.mark.parametrize("mode", [SUM, PRODUCT])
    def test_idempotent_and_supermultiplicative(self, mode):
        seq = t.ExplicitSeq(
            (Fraction(1, 2), Fraction(1, 5), Fraction(1, 4)), Fraction(1, 3)
        )
        horizon = 6
        first = t.regularize(seq, mode, horizon)
        again = t.regularize(
            t.ExplicitSeq(tuple(first), Fraction(1, 3)), mode, horizon
        )
        assert again == first
        for n in range(1, horizon + 1):
            for m in range(n, horizon + 1):
                idx = n + m if mode == SUM else n * m
                if idx <= horizon:
                    assert first[idx - 1] >= first[n - 1] * first[m - 1]

    def test_pointwise_dominates_input(self):
        seq = t.ExplicitSeq((Fraction(1, 2), Fraction(1, 5)), Fraction(1, 2))
        got = t.regularize(seq, SUM, 5)
        for n in range(1, 6):
            assert got[n - 1] >= t.theta(seq, n)


class TestCheckRegularity:
    def test_geometric_clean(self):
        report = t.check_regularity(t.Geometric(Fraction(1, 2)), SUM, 10)
        assert report.regular
        assert report.cn_nonincreasing

    def test_explicit_violation(self):
        seq = t.ExplicitSeq((Fraction(1, 2), Fraction(1, 5)), Fraction(1, 2))
        report = t.check_regularity(seq, SUM, 2)
        assert not report.regular
        assert report.supermultiplicativity_violations[0][:2] == (1, 1)

    def test_explicit_no_violation(self):
        seq = t.ExplicitSeq((Fraction(1, 2), Fraction(3, 10)), Fraction(1, 2))
        report = t.check_regularity(seq, SUM, 2)
        assert report.regular


class TestDerivedParams:
    def test_geometric_s_type_exact(self):
        spec = t.preset("geometric-s:1/2")
        params = t.derived_params(spec, 6)
        assert params.theta_limit_estimate == Fraction(1, 2)
        assert params.exact_limit
        assert all(c == 1 for c in params.c_n)

    def test_tzafriri_constant_cn(self):
        spec = t.preset("tzafriri:9/10")
        params = t.derived_params(spec, 8)
        assert params.q_estimate == 2
        for c in params.c_n:
            assert abs(c - 0.9) < 1e-12

    def test_schlumprecht_is_p1(self):
        params = t.derived_params(t.preset("schlumprecht"), 8)
        assert params.p_estimate == 1.0


class TestConfig:
    def test_single_roundtrip(self):
        spec = t.parse_space_config(
            "kind = single\nsingle_family = S1\nsingle_theta = 1/2\n"
        )
        assert spec.kind == "single"
        assert spec.single_family == t.Sn(1)
        assert spec.single_theta == Fraction(1, 2)

    def test_s_kind_with_inner(self):
        spec = t.parse_space_config(
            "kind = S\ntheta = geometric:1/2\ninner_ak = 3\n# comment\n"
        )
        assert spec.inner_ak == 3
        assert spec.family_for_index(2) == t.Compose(t.Sn(2), t.An(3))

    def test_explicit_file(self):
        seq = parse_explicit_file("1/2\n0.3\ntail 1/2\n")
        assert seq.values == (Fraction(1, 2), Fraction(3, 10))

    def test_errors(self):
        with pytest.raises(ParseError):
            t.parse_space_config("kind = Q\n")
        with pytest.raises(ParseError):
            parse_explicit_file("1/2\n")

    def test_inner_ak_rejected_for_a_type(self):
        with pytest.raises(ValueError):
            t.SpaceSpec("A", thetas=t.Geometric(Fraction(1, 2)), inner_ak=2)


class TestPresets:
    def test_names(self):
        assert t.preset("tsirelson").single_theta == Fraction(1, 2)
        assert t.preset("schlumprecht").arithmetic == "float64"
        assert t.preset("tzafriri:1/2").p_hint == 2.0
        assert t.preset("geometric-s:1/3").thetas == t.Geometric(Fraction(1, 3))
        with pytest.raises(ValueError):
            t.preset("nope")
