import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import tsirelson as t
from tsirelson.errors import EmptyVector, SupportTooLarge
from tsirelson.generators import random_vector
from tsirelson.norm import admissible_sum, brute_norm, norm

TSIRELSON = t.preset("tsirelson")
GEOM_S = t.preset("geometric-s:1/2")
SCHLUMPRECHT = t.preset("schlumprecht")
C0_A2 = t.SpaceSpec("single", single_family=t.An(2), single_theta=Fraction(1, 2))
ELL2 = t.preset("ellp:2")


def close(a, b, rel=1e-12):
    a, b = float(a), float(b)
    return abs(a - b) <= rel * max(abs(a), abs(b), 1.0)


class TestExamples:
    def test_c0_identity_on_pair(self):
        x = t.SparseVector(((1, Fraction(1)), (2, Fraction(1))))
        assert norm(C0_A2, x).value == 1

    def test_tsirelson_triple(self):
        x = t.SparseVector(((3, Fraction(1)), (4, Fraction(1)), (5, Fraction(1))))
        assert norm(TSIRELSON, x).value == Fraction(3, 2)

    def test_ell2_isometry_on_pair(self):
        x = t.SparseVector(((1, 1.0), (2, 1.0)))
        assert close(norm(ELL2, x).value, 2**0.5)

    def test_basis_is_normalized(self):
        for spec in (TSIRELSON, GEOM_S, C0_A2):
            assert norm(spec, t.SparseVector.basis(7)).value == 1

    def test_empty_vector(self):
        with pytest.raises(EmptyVector):
            norm(TSIRELSON, t.SparseVector(()))


class TestAdmissibleSum:
    X = t.SparseVector(((3, Fraction(1)), (4, Fraction(1)), (5, Fraction(1))))

    def test_a3_splits_into_singletons(self):
        result = admissible_sum(TSIRELSON, self.X, t.An(3))
        assert result.value == 3
        assert result.pieces == ((3,), (4,), (5,))

    def test_a1_is_the_norm(self):
        result = admissible_sum(TSIRELSON, self.X, t.An(1))
        assert result.value == norm(TSIRELSON, self.X).value

    def test_a2(self):
        result = admissible_sum(TSIRELSON, self.X, t.An(2))
        assert result.value == 2


class TestWitness:
    @pytest.mark.parametrize(
        "spec", [TSIRELSON, GEOM_S, C0_A2, SCHLUMPRECHT], ids=lambda s: s.name or "c0"
    )
    def test_witness_is_valid_and_attains(self, spec, rng):
        for _ in range(25):
            x = random_vector(rng, rng.randint(1, 6), exact=spec.exact)
            result = norm(spec, x)
            assert not t.validate(spec, result.witness)
            attained = t.eval_functional(spec, result.witness, x)
            if spec.exact:
                assert attained == result.value
            else:
                assert close(attained, result.value)

    def test_cutoff_certificate_is_dominated(self, rng):
        for spec in (GEOM_S, SCHLUMPRECHT):
            for _ in range(10):
                x = random_vector(rng, rng.randint(2, 6), exact=spec.exact)
                result = norm(spec, x)
                assert float(result.cutoff_bound) <= float(result.value) * (1 + 1e-12)


class TestOracle:
    @pytest.mark.parametrize(
        "spec", [TSIRELSON, GEOM_S, C0_A2], ids=lambda s: s.name or "c0"
    )
    def test_exact_agreement(self, spec, rng):
        for _ in range(30):
            x = random_vector(rng, rng.randint(1, 5))
            assert norm(spec, x).value == brute_norm(spec, x, len(x))

    def test_depth_zero_is_sup_norm(self, rng):
        x = random_vector(rng, 5)
        assert brute_norm(TSIRELSON, x, 0) == x.sup_norm()

    def test_brute_is_lower_bound_at_any_depth(self, rng):
        for _ in range(10):
            x = random_vector(rng, rng.randint(2, 5))
            full = norm(GEOM_S, x).value
            for depth in range(len(x) + 1):
                assert brute_norm(GEOM_S, x, depth) <= full

    def test_support_cap(self):
        x = t.SparseVector(tuple((i, Fraction(1)) for i in range(1, 11)))
        with pytest.raises(SupportTooLarge):
            brute_norm(TSIRELSON, x, 2)

    def test_auxiliary_space_agreement(self, rng):
        # the inner-A_k composed ladder runs through the same engine
        aux = GEOM_S.with_inner_ak(2)
        for _ in range(12):
            x = random_vector(rng, rng.randint(2, 5))
            assert norm(aux, x).value == brute_norm(aux, x, len(x))
            assert norm(aux, x).value >= norm(GEOM_S, x).value


class TestInvariants:
    @settings(max_examples=40, derandomize=True, deadline=None)
    @given(
        st.lists(
            st.tuples(st.integers(1, 20), st.fractions(min_value=-3, max_value=3)),
            min_size=1,
            max_size=5,
        ),
        st.fractions(min_value=Fraction(1, 3), max_value=3),
    )
    def test_homogeneous_and_unconditional(self, pairs, scale):
        seen = set()
        entries = []
        for c, v in sorted(pairs):
            if c not in seen and v != 0:
                entries.append((c, v))
                seen.add(c)
        if not entries:
            return
        x = t.SparseVector(tuple(entries))
        base = norm(TSIRELSON, x).value
        assert norm(TSIRELSON, x.scale(scale)).value == scale * base
        flipped = t.SparseVector(tuple((c, -v) for c, v in entries))
        assert norm(TSIRELSON, flipped).value == base
        absolute = t.SparseVector(tuple((c, abs(v)) for c, v in entries))
        assert norm(TSIRELSON, absolute).value == base

    def test_monotone_under_interval_restriction(self, rng):
        for _ in range(15):
            x = random_vector(rng, rng.randint(2, 6))
            full = norm(GEOM_S, x).value
            coords = x.support
            for a in range(len(coords)):
                for b in range(a + 1, len(coords) + 1):
                    piece = x.restrict(coords[a:b])
                    assert norm(GEOM_S, piece).value <= full

    def test_fixed_point_reexpansion(self, rng):
        # one Bellman re-expansion at the root, with fresh norm() calls on
        # the pieces, reproduces the value
        for spec in (TSIRELSON, GEOM_S):
            for _ in range(8):
                x = random_vector(rng, rng.randint(2, 5))
                result = norm(spec, x)
                coords = x.support
                best = x.sup_norm()
                max_n = result.max_n_explored + 1
                for n in range(1, max_n + 1):
                    fam = spec.family_for_index(1) if spec.kind == "single" else spec.family_for_index(n)
                    if spec.kind == "single" and n > 1:
                        break
                    theta = spec.theta_for_index(n)
                    for s in range(len(coords)):
                        best = max(
                            best,
                            theta
                            * _best_partition_sum(spec, x, coords[s:], fam),
                        )
                assert best == result.value

    def test_every_valid_functional_is_dominated(self, rng):
        from tsirelson.generators import random_valid_functional

        for spec in (TSIRELSON, GEOM_S):
            for _ in range(20):
                x = random_vector(rng, rng.randint(2, 6))
                f = random_valid_functional(spec, rng, x.support)
                assert t.eval_functional(spec, f, x) <= norm(spec, x).value

    def test_admissible_sum_rejects_empty(self):
        with pytest.raises(EmptyVector):
            admissible_sum(TSIRELSON, t.SparseVector(()), t.An(2))

    def test_norm_below_ellp_for_p_space_presets(self, rng):
        for _ in range(10):
            x = random_vector(rng, rng.randint(1, 6), exact=False)
            assert float(norm(SCHLUMPRECHT, x).value) <= x.ellp(1) + 1e-9
            assert float(norm(t.preset("tzafriri:1/2"), x).value) <= x.ellp(2) + 1e-9


def _best_partition_sum(spec, x, coords, fam):
    best = 0
    n = len(coords)
    for mask in range(1 << (n - 1)):
        pieces = []
        start = 0
        for i in range(n - 1):
            if mask >> i & 1:
                pieces.append(coords[start : i + 1])
                start = i + 1
        pieces.append(coords[start:])
        if not t.is_member(fam, tuple(p[0] for p in pieces)):
            continue
        total = sum(norm(spec, x.restrict(p)).value for p in pieces)
        best = max(best, total)
    return best
