"""Finitely supported vectors with exact or float coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple

from .errors import ParseError
from .scalars import as_fraction, render_scalar


@dataclass(frozen=True)
class SparseVector:
    """A finitely supported vector; coordinates strictly increasing, no zeros."""

    entries: Tuple[Tuple[int, object], ...]

    def __post_init__(self):
        last = 0
        for coord, value in self.entries:
            if not isinstance(coord, int) or coord < 1:
                raise ValueError(f"coordinates must be positive integers: {coord!r}")
            if coord <= last:
                raise ValueError("coordinates must be strictly increasing")
            if value == 0:
                raise ValueError("zero values must not be stored")
            last = coord

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, object]]) -> "SparseVector":
        cleaned = [(c, v) for c, v in pairs if v != 0]
        cleaned.sort(key=lambda cv: cv[0])
        return cls(tuple(cleaned))

    @classmethod
    def basis(cls, coord: int, value=1) -> "SparseVector":
        return cls(((coord, value),))

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(c for c, _ in self.entries)

    @property
    def values(self) -> Tuple[object, ...]:
        return tuple(v for _, v in self.entries)

    def __len__(self):
        return len(self.entries)

    def __bool__(self):
        return bool(self.entries)

    def __getitem__(self, coord: int):
        for c, v in self.entries:
            if c == coord:
                return v
        return 0

    def __lt__(self, other: "SparseVector") -> bool:
        """Block order: every coordinate of self precedes every one of other."""
        if not self.entries or not other.entries:
            raise ValueError("block order is defined for nonempty vectors")
        return self.entries[-1][0] < other.entries[0][0]

    def scale(self, factor) -> "SparseVector":
        if factor == 0:
            return SparseVector(())
        return SparseVector(tuple((c, v * factor) for c, v in self.entries))

    def add(self, other: "SparseVector") -> "SparseVector":
        merged: dict = {}
        for c, v in self.entries:
            merged[c] = v
        for c, v in other.entries:
            merged[c] = merged.get(c, 0) + v
        return SparseVector.from_pairs(merged.items())

    def restrict(self, coords) -> "SparseVector":
        keep = set(coords)
        return SparseVector(tuple((c, v) for c, v in self.entries if c in keep))

    def restrict_range(self, lo: int, hi: int) -> "SparseVector":
        """Entries with lo <= coordinate <= hi."""
        return SparseVector(tuple((c, v) for c, v in self.entries if lo <= c <= hi))

    def sup_norm(self):
        if not self.entries:
            return 0
        return max(abs(v) for _, v in self.entries)

    def ell1(self):
        return sum((abs(v) for _, v in self.entries), start=0)

    def ellp(self, p: float) -> float:
        if p == 1:
            return float(self.ell1())
        return float(sum(abs(float(v)) ** p for _, v in self.entries)) ** (1.0 / p)

    def range(self) -> Tuple[int, int]:
        if not self.entries:
            raise ValueError("empty vector has no range")
        return self.entries[0][0], self.entries[-1][0]


def sum_vectors(vectors: Iterable[SparseVector]) -> SparseVector:
    total = SparseVector(())
    for v in vectors:
        total = total.add(v)
    return total


def parse_vector(text: str, arithmetic: str = "rational") -> SparseVector:
    """Parse the tab-separated vector format; `#` starts a comment."""
    pairs = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'coordinate<TAB>value', got {line!r}", line=lineno)
        try:
            coord = int(parts[0])
            value = Fraction(parts[1])
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), line=lineno) from None
        if coord <= last:
            raise ParseError(f"coordinates out of order at {coord}", line=lineno)
        last = coord
        if value != 0:
            pairs.append((coord, value if arithmetic == "rational" else float(value)))
    return SparseVector(tuple(pairs))


def format_vector(x: SparseVector) -> str:
    return "\n".join(f"{c}\t{render_scalar(v)}" for c, v in x.entries) + "\n"


def as_exact(x: SparseVector) -> SparseVector:
    return SparseVector(tuple((c, as_fraction(v)) for c, v in x.entries))


def as_float(x: SparseVector) -> SparseVector:
    return SparseVector(tuple((c, float(v)) for c, v in x.entries))
