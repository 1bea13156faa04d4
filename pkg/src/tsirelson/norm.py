"""Evaluation of the implicit mixed-Tsirelson norm by dynamic programming.

The norm solves

    ||x|| = max( ||x||_inf , sup_n theta_n * sup { sum_i ||E_i x|| } )

with the inner sup over level-n-family-admissible successive sets.  Two
reductions make this computable on the support alone:

* admissible sets may be replaced by consecutive runs of support
  coordinates: intersecting with the support keeps the value and weakly
  raises minima (spreading preserves admissibility), and extending each set
  rightward to the next set's first support point weakly raises the value
  (1-unconditionality) without moving minima;
* weight indices beyond a cutoff cannot win because every level-n candidate
  is bounded by theta_n times the l1 norm of the segment; the engine
  explores n until the tail sup of the weights times the segment's l1 norm
  is dominated and records that bound as a certificate.

The DP state is a support-index interval; admissible partitions of an
interval are maximized layer by layer following the recursive structure of
the families (piece-count budgets for A_n, the S_1[S_{n-1}] recursion for
S_n, and flattening for compositions).  ``brute_norm`` is an independent
oracle that enumerates tree functionals over the support directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import families
from .errors import EmptyVector, SupportTooLarge
from .functionals import Leaf, Node, TreeFunctional
from .spaces import A_TYPE, SINGLE, SpaceSpec
from .vectors import SparseVector

Interval = Tuple[int, int]


def flatten_pieces(pieces) -> List[Interval]:
    """Expand the lazy piece representation into interval pairs."""
    out: List[Interval] = []
    stack = [pieces]
    while stack:
        node = stack.pop()
        tag = node[0]
        if tag == "one":
            out.append((node[1], node[2]))
        elif tag == "sing":
            out.extend((t, t + 1) for t in range(node[1], node[2]))
        else:
            stack.append(node[2])
            stack.append(node[1])
    return out


@dataclass(frozen=True)
class NormResult:
    value: object
    witness: TreeFunctional
    max_n_explored: int
    cutoff_bound: object

    def as_dict(self):
        from .functionals import format_functional
        from .scalars import render_scalar

        return {
            "value": render_scalar(self.value),
            "witness": format_functional(self.witness),
            "max_n_explored": self.max_n_explored,
        }


@dataclass(frozen=True)
class AdmissibleSumResult:
    value: object
    pieces: Tuple[Tuple[int, ...], ...]


class _Engine:
    """Interval DP over the support of one vector in one space."""

    def __init__(self, space: SpaceSpec, x: SparseVector):
        if not x:
            raise EmptyVector("norm of the empty vector is not defined")
        self.space = space
        self.coords = x.support
        self.values = x.values
        self.m = len(self.coords)
        self.abs_values = tuple(abs(v) for v in self.values)
        prefix = [0 if space.exact else 0.0]
        for v in self.abs_values:
            prefix.append(prefix[-1] + v)
        self.prefix = prefix
        self.D: Dict[Interval, object] = {}
        self.decisions: Dict[Interval, tuple] = {}
        self._adm_memo: Dict[tuple, Optional[tuple]] = {}
        self._count_memo: Dict[tuple, Optional[tuple]] = {}
        self._stack_family: Dict[tuple, families.FamilyExpr] = {}
        self._in_progress: Optional[Interval] = None
        self.max_n_explored = 0
        self.cutoff_bound = None

    # -- basics ------------------------------------------------------------

    def ell1(self, i: int, j: int):
        return self.prefix[j] - self.prefix[i]

    def _d(self, i: int, j: int):
        if (i, j) == self._in_progress:
            return None
        return self.D[(i, j)]

    # -- admissible-partition DP -------------------------------------------

    def _composed(self, stack: tuple) -> families.FamilyExpr:
        if stack not in self._stack_family:
            fam = stack[-1]
            for outer in reversed(stack[:-1]):
                fam = families.Compose(outer, fam)
            self._stack_family[stack] = fam
        return self._stack_family[stack]

    def _adm(self, stack: tuple, i: int, j: int) -> Optional[tuple]:
        """Best (value, pieces) over partitions of [i, j) whose minima are
        admissible for the family chain `stack`; None if every candidate
        referenced the in-progress interval."""
        if not stack:
            d = self._d(i, j)
            if d is None:
                return None
            return (d, ("one", i, j))
        poisoned = self._in_progress is not None and i == self._in_progress[0] and j == self._in_progress[1]
        key = (stack, i, j)
        if not poisoned and key in self._adm_memo:
            return self._adm_memo[key]
        head, rest = stack[0], stack[1:]
        if isinstance(head, families.Compose):
            result = self._adm((head.outer, head.inner) + rest, i, j)
            if not poisoned:
                self._adm_memo[key] = result
            return result
        if isinstance(head, families.Sn) and head.n == 0:
            result = self._adm(rest, i, j)
            if not poisoned:
                self._adm_memo[key] = result
            return result
        if isinstance(head, families.An):
            budget = head.n
            inner = rest
        else:  # Sn(m), m >= 1
            budget = self.coords[i]
            inner = ((families.Sn(head.n - 1),) + rest) if head.n >= 2 else rest
        # fast path: the all-singletons partition dominates every other one
        # (each piece value is at most its l1 norm), so if it is admissible
        # it is optimal.
        if j - i <= budget and self._full_set_admissible(stack, i, j):
            result = (self.ell1(i, j), ("sing", i, j))
            if not poisoned:
                self._adm_memo[key] = result
            return result
        best: Optional[tuple] = None
        for k in range(1, min(budget, j - i) + 1):
            cand = self._count(inner, i, j, k)
            if cand is not None and (best is None or cand[0] > best[0]):
                best = cand
        if not poisoned:
            self._adm_memo[key] = best
        return best

    def _full_set_admissible(self, stack: tuple, i: int, j: int) -> bool:
        """Membership of all coordinates in [i, j) in the composed family,
        without materializing the slice for the cheap shapes."""
        fam = self._composed(stack)
        if isinstance(fam, families.An):
            return j - i <= fam.n
        if isinstance(fam, families.Sn) and fam.n == 1:
            return j - i <= self.coords[i]
        return families.is_member(fam, self.coords[i:j])

    def _count(self, inner: tuple, a: int, j: int, k: int) -> Optional[tuple]:
        """Best (value, pieces) over partitions of [a, j) into exactly k
        inner-chain groups."""
        if k == 1:
            return self._adm(inner, a, j)
        key = (inner, a, j, k)
        if key in self._count_memo:
            return self._count_memo[key]
        best: Optional[tuple] = None
        for e in range(a + 1, j - k + 2):
            left = self._adm(inner, a, e)
            if left is None:
                continue
            right = self._count(inner, e, j, k - 1)
            if right is None:
                continue
            value = left[0] + right[0]
            if best is None or value > best[0]:
                best = (value, ("cat", left[1], right[1]))
        self._count_memo[key] = best
        return best

    # -- the main table ------------------------------------------------------

    def fill(self):
        space = self.space
        n_start = 2 if space.kind == A_TYPE else 1
        for length in range(1, self.m + 1):
            for i in range(0, self.m - length + 1):
                j = i + length
                self._in_progress = (i, j)
                if length == 1:
                    self.D[(i, j)] = self.abs_values[i]
                    self.decisions[(i, j)] = ("leaf", i)
                    self._in_progress = None
                    continue
                best = self.D[(i + 1, j)]
                decision = ("suffix",)
                if self.abs_values[i] >= best:
                    best = self.abs_values[i]
                    decision = ("leaf", i)
                ell1 = self.ell1(i, j)
                n = n_start
                while True:
                    if space.kind == SINGLE and n > 1:
                        break
                    tail = space.theta_tail_sup(n)
                    bound = tail * ell1
                    if not bound > best:
                        if (i, j) == (0, self.m):
                            self.cutoff_bound = bound
                        break
                    theta_n = space.theta_for_index(n)
                    if theta_n * ell1 > best:
                        self.max_n_explored = max(self.max_n_explored, n)
                        fam = space.family_for_index(n)
                        cand = self._adm((fam,), i, j)
                        if cand is not None:
                            value = theta_n * cand[0]
                            if value > best:
                                best = value
                                decision = ("node", n, cand[1])
                    n += 1
                self.D[(i, j)] = best
                self.decisions[(i, j)] = decision
                self._in_progress = None
        if self.cutoff_bound is None:
            # single-family spaces, or tiny supports where the loop never ran
            self.cutoff_bound = (
                self.space.theta_tail_sup(2) * self.ell1(0, self.m)
                if self.m
                else 0
            )

    def witness(self, i: int, j: int) -> TreeFunctional:
        kind = self.decisions[(i, j)]
        if kind[0] == "leaf":
            t = kind[1]
            value = self.values[t]
            return Leaf(1 if value >= 0 else -1, self.coords[t])
        if kind[0] == "suffix":
            return self.witness(i + 1, j)
        _, n, pieces = kind
        return Node(n, tuple(self.witness(a, b) for a, b in flatten_pieces(pieces)))


def norm(space: SpaceSpec, x: SparseVector) -> NormResult:
    """Norm of a finitely supported vector, with a witness functional and a
    cutoff certificate for the unexplored weight indices."""
    engine = _Engine(space, x)
    engine.fill()
    value = engine.D[(0, engine.m)]
    if space.exact and not isinstance(value, Fraction):
        value = Fraction(value)
    return NormResult(
        value=value,
        witness=engine.witness(0, engine.m),
        max_n_explored=max(engine.max_n_explored, 1),
        cutoff_bound=engine.cutoff_bound,
    )


def norm_value(space: SpaceSpec, x: SparseVector):
    return norm(space, x).value


def admissible_sum(
    space: SpaceSpec, x: SparseVector, family: families.FamilyExpr
) -> AdmissibleSumResult:
    """sup of sums of piece norms over family-admissible successive sets,
    with the maximizing pieces (as coordinate sets)."""
    engine = _Engine(space, x)
    engine.fill()
    best = None
    best_pieces = None
    for s in range(engine.m):
        cand = engine._adm((family,), s, engine.m)
        if cand is not None and (best is None or cand[0] > best):
            best, best_pieces = cand[0], cand[1]
    pieces = tuple(engine.coords[a:b] for a, b in flatten_pieces(best_pieces))
    if space.exact and not isinstance(best, Fraction):
        best = Fraction(best)
    return AdmissibleSumResult(best, pieces)


# ---------------------------------------------------------------------------
# independent brute-force oracle

BRUTE_SUPPORT_BOUND = 8


def brute_norm(space: SpaceSpec, x: SparseVector, depth_cap: int):
    """Exhaustive enumeration of tree functionals of height <= depth_cap.

    Sound but exponential; supports up to 8 coordinates.  Every functional
    of weight theta_n is bounded by theta_n times the l1 norm, so weight
    indices stop being explored once their tail sup cannot beat the best
    value found; this is the only pruning used.
    """
    if not x:
        raise EmptyVector("norm of the empty vector is not defined")
    if len(x) > BRUTE_SUPPORT_BOUND:
        raise SupportTooLarge(f"brute_norm handles supports up to {BRUTE_SUPPORT_BOUND}")
    coords = x.support
    absval = {c: abs(v) for c, v in x.entries}
    memo: Dict[tuple, object] = {}

    single = space.kind == SINGLE

    def theta_options(minima: Tuple[int, ...], n_cap: int) -> List[int]:
        """Weight indices n <= n_cap admitting these minima."""
        if single:
            return [1] if families.is_member(space.family_for_index(1), minima) else []
        if space.kind == A_TYPE:
            lo = len(minima)
            return list(range(max(lo, 1), n_cap + 1))
        # S-type: admissibility is monotone in n; binary search the threshold
        lo, hi = 1, n_cap
        if not families.is_member(space.family_for_index(hi), minima):
            return []
        while lo < hi:
            mid = (lo + hi) // 2
            if families.is_member(space.family_for_index(mid), minima):
                hi = mid
            else:
                lo = mid + 1
        return list(range(lo, n_cap + 1))

    def best_theta(ns: List[int]):
        return max(space.theta_for_index(n) for n in ns) if ns else None

    def rec(sub: Tuple[int, ...], depth: int):
        key = (sub, depth)
        if key in memo:
            return memo[key]
        best = max(absval[c] for c in sub)
        if depth > 0:
            ell1 = sum(absval[c] for c in sub)
            # static sound cap: beyond n_cap, theta tail * l1 <= best already
            n_cap = 1
            while space.theta_tail_sup(n_cap + 1) * ell1 > best and n_cap < 4096:
                n_cap += 1
            if single:
                n_cap = 1
            for subset in _nonempty_subsets(sub):
                for pieces in _successive_splits(subset):
                    minima = tuple(p[0] for p in pieces)
                    ns = theta_options(minima, n_cap)
                    theta = best_theta(ns)
                    if theta is None:
                        continue
                    total = sum(rec(p, depth - 1) for p in pieces)
                    cand = theta * total
                    if cand > best:
                        best = cand
        memo[key] = best
        return best

    return rec(coords, depth_cap)


def _nonempty_subsets(elems: Tuple[int, ...]):
    n = len(elems)
    for mask in range(1, 1 << n):
        yield tuple(elems[i] for i in range(n) if mask >> i & 1)


def _successive_splits(elems: Tuple[int, ...]):
    """All partitions of the tuple into consecutive runs (successive sets)."""
    n = len(elems)
    for mask in range(1 << (n - 1)):
        pieces = []
        start = 0
        for i in range(n - 1):
            if mask >> i & 1:
                pieces.append(elems[start : i + 1])
                start = i + 1
        pieces.append(elems[start:])
        yield tuple(pieces)


# ---------------------------------------------------------------------------
# flat vectors in A-type spaces

def flat_norm_table(space: SpaceSpec, max_len: int) -> List[object]:
    """Norms of flat 0/1 vectors of length 1..max_len in an A-type space.

    A_n-admissibility depends only on piece counts, so the norm of a flat
    vector depends only on its length; g[L] is computed by an exact-count
    max-plus convolution over piece lengths.  Used by the large-scale audit
    constructions where the generic interval DP is out of reach.
    """
    if space.kind != A_TYPE:
        raise ValueError("flat_norm_table applies to A-type spaces")
    import numpy as np

    g = np.zeros(max_len + 1)
    g[1] = 1.0
    # a k-piece split is admissible for every level n >= k, so the best
    # weight for it is the tail sup of the weights from k on
    theta_from = np.zeros(max_len + 1)
    for k in range(1, max_len + 1):
        theta_from[k] = float(space.theta_tail_sup(k))
    # H[k][l] = best sum of piece norms over exactly k pieces of total
    # length l; rows extend by one entry as l grows, H[1] aliases g
    H = [None, g]
    for L in range(2, max_len + 1):
        best = 1.0
        for k in range(2, L + 1):
            if len(H) <= k:
                H.append(np.full(max_len + 1, -np.inf))
            if k == L:
                H[k][L] = float(L)
            else:
                s = np.arange(1, L - k + 2)
                H[k][L] = np.max(g[s] + H[k - 1][L - s])
            cand = theta_from[k] * H[k][L]
            if cand > best:
                best = cand
        g[L] = best
    return [None] + [float(v) for v in g[1 : max_len + 1]]
