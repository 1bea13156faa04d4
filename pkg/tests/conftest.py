import random
from fractions import Fraction

import pytest

import tsirelson as t
from tsirelson.norm import norm


def exhaustive_member(family, elems):
    """Pure exhaustive decomposition search; the membership oracle."""
    elems = tuple(elems)
    if not elems:
        return True
    if isinstance(family, t.An):
        return len(elems) <= family.n
    if isinstance(family, t.Sn):
        if family.n == 0:
            return len(elems) <= 1
        if family.n == 1:
            return len(elems) <= elems[0]
        return _exists_split(
            elems,
            lambda piece: exhaustive_member(t.Sn(family.n - 1), piece),
            lambda k: k <= elems[0],
        )
    return _exists_split(
        elems,
        lambda piece: exhaustive_member(family.inner, piece),
        None,
        outer=family.outer,
    )


def _exists_split(elems, piece_ok, count_ok, outer=None):
    n = len(elems)
    for mask in range(1 << (n - 1)):
        pieces = []
        start = 0
        for i in range(n - 1):
            if mask >> i & 1:
                pieces.append(elems[start : i + 1])
                start = i + 1
        pieces.append(elems[start:])
        if not all(piece_ok(p) for p in pieces):
            continue
        if count_ok is not None and not count_ok(len(pieces)):
            continue
        if outer is not None and not exhaustive_member(
            outer, tuple(p[0] for p in pieces)
        ):
            continue
        return True
    return False


def random_partition_instance(rng, space, m, delta):
    """A random vector meeting the equal-norm-partition hypothesis, built by
    normalizing a long near-flat vector exactly."""
    count = int(24 * m * m / float(delta)) + rng.randint(0, 8)
    c = count + rng.randint(0, 10)
    entries = []
    for _ in range(count):
        entries.append((c, Fraction(rng.randint(2, 3))))
        c += rng.randint(1, 2)
    z = t.SparseVector(tuple(entries))
    from tsirelson.averages import interval_norm_table

    coords, d = interval_norm_table(space, z)
    return z.scale(Fraction(1) / d(0, len(coords)))


@pytest.fixture
def rng():
    return random.Random(20240817)
