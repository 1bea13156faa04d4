"""Weight sequences, their regularizations, and full space definitions.

A space is determined by a family kind (the full ladder ``A_n`` or ``S_n``,
optionally composed with an inner ``A_k``, or a single family with a single
weight) together with a weight sequence.  Weight sequences are exact in
rational mode; variants whose values are irrational raise
``IrrationalInRationalMode`` there and are meant for float mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from . import families
from .errors import IrrationalInRationalMode, ParseError
from .scalars import FLOAT64, RATIONAL, as_fraction, integer_root, parse_scalar


@dataclass(frozen=True)
class Geometric:
    """theta_n = ratio**n."""

    ratio: Fraction

    def __post_init__(self):
        object.__setattr__(self, "ratio", as_fraction(self.ratio))
        if not (0 < self.ratio < 1):
            raise ValueError("geometric ratio must lie in (0,1)")


@dataclass(frozen=True)
class PowerLaw:
    """theta_n = n**(-1/q) with q > 1.  Note theta_1 = 1; see ledger note."""

    q: float

    def __post_init__(self):
        if not self.q > 1:
            raise ValueError("power law requires q > 1")


@dataclass(frozen=True)
class ScaledPowerLaw:
    """theta_n = c * n**(-1/q); the Tzafriri family has q = 2."""

    c: float
    q: float

    def __post_init__(self):
        if not (0 < self.c < 1):
            raise ValueError("scale must lie in (0,1)")
        if not self.q > 1:
            raise ValueError("scaled power law requires q > 1")


@dataclass(frozen=True)
class LogReciprocal:
    """theta_n = 1/log2(n+1), the Schlumprecht weights.  theta_1 = 1."""


@dataclass(frozen=True)
class ExplicitSeq:
    """Finitely many explicit weights continued by a geometric tail."""

    values: Tuple[Fraction, ...]
    tail: Fraction

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_fraction(v) for v in self.values))
        object.__setattr__(self, "tail", as_fraction(self.tail))
        if not self.values:
            raise ValueError("explicit sequence needs at least one value")
        for v in self.values:
            if not (0 < v < 1):
                raise ValueError("explicit weights must lie in (0,1)")
        if not (0 < self.tail < 1):
            raise ValueError("tail ratio must lie in (0,1)")


ThetaSeq = object  # union of the five variants above


def theta(seq: ThetaSeq, n: int, arithmetic: str = RATIONAL):
    """The n-th weight, exact in rational mode or float in float mode."""
    if n < 1:
        raise ValueError("weights are indexed from 1")
    exact = arithmetic == RATIONAL
    if isinstance(seq, Geometric):
        value = seq.ratio**n
        return value if exact else float(value)
    if isinstance(seq, ExplicitSeq):
        if n <= len(seq.values):
            value = seq.values[n - 1]
        else:
            value = seq.values[-1] * seq.tail ** (n - len(seq.values))
        return value if exact else float(value)
    if isinstance(seq, PowerLaw):
        return _power_theta(1, seq.q, n, exact)
    if isinstance(seq, ScaledPowerLaw):
        return _power_theta(seq.c, seq.q, n, exact)
    if isinstance(seq, LogReciprocal):
        if exact:
            j = (n + 1).bit_length() - 1
            if (1 << j) == n + 1:
                return Fraction(1, j)
            raise IrrationalInRationalMode(
                f"1/log2({n + 1}) is irrational; use float mode"
            )
        return 1.0 / math.log2(n + 1)
    raise TypeError(f"not a weight sequence: {seq!r}")


def _power_theta(c, q, n, exact):
    if exact:
        if isinstance(q, int) or float(q).is_integer():
            root = integer_root(n, int(q))
            if root is not None:
                return as_fraction(c) / root
        raise IrrationalInRationalMode(
            f"{n}**(-1/{q}) is irrational; use float mode"
        )
    return float(c) * float(n) ** (-1.0 / float(q))


def theta_sup_from(seq: ThetaSeq, n: int, arithmetic: str = FLOAT64):
    """sup of theta_m over m >= n; used as a sound tail bound by the norm engine."""
    if n < 1:
        n = 1
    exact = arithmetic == RATIONAL
    if isinstance(seq, Geometric):
        return theta(seq, n, arithmetic)
    if isinstance(seq, (PowerLaw, ScaledPowerLaw, LogReciprocal)):
        # decreasing sequences
        if isinstance(seq, LogReciprocal) and exact:
            # exact upper bound: 1/j for the largest power of two <= n+1
            j = (n + 1).bit_length() - 1
            return Fraction(1, max(j, 1))
        if exact:
            raise IrrationalInRationalMode("power-law tail bound needs float mode")
        return theta(seq, n, FLOAT64)
    if isinstance(seq, ExplicitSeq):
        candidates = list(seq.values[n - 1 :])
        tail_start = max(n, len(seq.values) + 1)
        candidates.append(
            seq.values[-1] * seq.tail ** (tail_start - len(seq.values))
        )
        best = max(candidates)
        return best if exact else float(best)
    raise TypeError(f"not a weight sequence: {seq!r}")


PRODUCT = "product"
SUM = "sum"


def regularize(seq: ThetaSeq, mode: str, horizon: int, arithmetic: str = RATIONAL):
    """Regularized weights theta-hat_1..theta-hat_N.

    Product mode takes the sup of products of weights over index tuples whose
    product reaches n; sum mode over tuples whose sum reaches n.  Factors and
    summands are truncated at the horizon, which loses nothing for the
    finitely supported vectors this drives (only indices up to the support
    span matter).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    th = [theta(seq, n, arithmetic) for n in range(1, 2 * horizon)]
    if mode == SUM:
        # g[s] = best product with summands <= horizon summing exactly to s;
        # minimal combinations have total < n + horizon, so 2N-1 suffices.
        g = [None] * (2 * horizon)
        for s in range(1, 2 * horizon):
            best = th[s - 1] if s <= horizon else None
            for m in range(1, min(s - 1, horizon) + 1):
                cand = th[m - 1] * g[s - m]
                if best is None or cand > best:
                    best = cand
            g[s] = best
        return [max(g[n : 2 * horizon]) for n in range(1, horizon + 1)]
    if mode == PRODUCT:
        memo: dict = {}

        def hat(n: int):
            if n <= 1:
                return max(th[:horizon])
            if n in memo:
                return memo[n]
            best = None
            for m in range(2, horizon + 1):
                if m >= n:
                    cand = th[m - 1]
                else:
                    cand = th[m - 1] * hat(-(-n // m))  # ceil(n/m) < n
                if best is None or cand > best:
                    best = cand
            memo[n] = best
            return best

        return [hat(n) for n in range(1, horizon + 1)]
    raise ValueError(f"unknown regularization mode {mode!r}")


@dataclass(frozen=True)
class RegularityReport:
    mode: str
    horizon: int
    monotonicity_violations: Tuple[Tuple[int, object, object], ...]
    supermultiplicativity_violations: Tuple[Tuple[int, int, object, object], ...]
    cn_nonincreasing: bool
    theta_limit_estimate: float

    @property
    def regular(self) -> bool:
        return not self.monotonicity_violations and not self.supermultiplicativity_violations


def check_regularity(seq: ThetaSeq, mode: str, horizon: int, arithmetic: str = RATIONAL) -> RegularityReport:
    """Check monotone decrease and super-multiplicativity within the horizon.

    Also reports whether theta_n/theta^n is non-increasing (the hypothesis
    under which the special-average machinery applies), using the
    finite-horizon estimate of theta.
    """
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    th = [theta(seq, n, arithmetic) for n in range(1, horizon + 1)]
    mono = tuple(
        (n + 1, th[n - 1], th[n])
        for n in range(1, horizon)
        if th[n] > th[n - 1]
    )
    super_viol = []
    for n in range(1, horizon + 1):
        for m in range(n, horizon + 1):
            idx = n + m if mode == SUM else n * m
            if idx > horizon:
                continue
            if th[idx - 1] < th[n - 1] * th[m - 1]:
                super_viol.append((n, m, th[idx - 1], th[n - 1] * th[m - 1]))
    theta_lim = max(float(th[n - 1]) ** (1.0 / n) for n in range(1, horizon + 1))
    cns = [float(th[n - 1]) / theta_lim**n for n in range(1, horizon + 1)]
    cn_mono = all(b <= a * (1 + 1e-12) for a, b in zip(cns, cns[1:]))
    return RegularityReport(mode, horizon, mono, tuple(super_viol), cn_mono, theta_lim)


A_TYPE = "A"
S_TYPE = "S"
SINGLE = "single"


@dataclass(frozen=True)
class SpaceSpec:
    """A full space definition.

    ``kind`` selects the family ladder: ``A`` uses A_n, ``S`` uses S_n
    (optionally composed with an inner A_k when ``inner_ak`` is set, the
    auxiliary spaces used by the functional surgery), and ``single`` uses one
    family with one weight.  ``p_hint`` records the exponent p for p-space
    presets, where known.
    """

    kind: str
    thetas: Optional[ThetaSeq] = None
    single_family: Optional[families.FamilyExpr] = None
    single_theta: object = None
    inner_ak: Optional[int] = None
    arithmetic: str = RATIONAL
    name: str = ""
    p_hint: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (A_TYPE, S_TYPE, SINGLE):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind == SINGLE:
            if self.single_family is None or self.single_theta is None:
                raise ValueError("single-family spaces need a family and a weight")
        elif self.thetas is None:
            raise ValueError("A/S spaces need a weight sequence")
        if self.inner_ak is not None:
            if self.kind == A_TYPE or (
                self.kind == SINGLE and not isinstance(self.single_family, families.Sn)
            ):
                raise ValueError("inner_ak applies to S-type (and single-S_n) spaces only")
            if self.inner_ak < 1:
                raise ValueError("inner_ak must be >= 1")
        if self.arithmetic not in (RATIONAL, FLOAT64):
            raise ValueError(f"unknown arithmetic mode {self.arithmetic!r}")
        if self.kind == SINGLE and self.arithmetic == RATIONAL:
            as_fraction(self.single_theta)  # raises if not exact

    @property
    def exact(self) -> bool:
        return self.arithmetic == RATIONAL

    def max_index(self) -> Optional[int]:
        return 1 if self.kind == SINGLE else None

    def family_for_index(self, n: int) -> families.FamilyExpr:
        if self.kind == SINGLE:
            if n != 1:
                raise ValueError("single-family spaces only have index 1")
            base = self.single_family
        elif self.kind == A_TYPE:
            base = families.An(n)
        else:
            base = families.Sn(n)
        if self.inner_ak is not None:
            base = families.Compose(base, families.An(self.inner_ak))
        return base

    def theta_for_index(self, n: int):
        if self.kind == SINGLE:
            if n != 1:
                raise ValueError("single-family spaces only have index 1")
            if self.exact:
                return as_fraction(self.single_theta)
            return float(self.single_theta)
        return theta(self.thetas, n, self.arithmetic)

    def theta_tail_sup(self, n: int):
        if self.kind == SINGLE:
            return self.theta_for_index(1) if n <= 1 else 0
        return theta_sup_from(self.thetas, n, self.arithmetic)

    def with_inner_ak(self, k: Optional[int]) -> "SpaceSpec":
        return SpaceSpec(
            kind=self.kind,
            thetas=self.thetas,
            single_family=self.single_family,
            single_theta=self.single_theta,
            inner_ak=k,
            arithmetic=self.arithmetic,
            name=self.name,
            p_hint=self.p_hint,
        )


@dataclass(frozen=True)
class DerivedParams:
    """Finite-horizon estimates of the derived space parameters.

    Every field is an estimate (sup over n <= horizon) except where the
    weight sequence makes the limit exact (geometric).
    """

    horizon: int
    theta_hat_horizon: Tuple[object, ...]
    theta_limit_estimate: object
    c_n: Tuple[object, ...]
    q_n: Tuple[Optional[float], ...]
    q_estimate: Optional[float]
    p_estimate: Optional[float]
    exact_limit: bool = False


def derived_params(spec: SpaceSpec, horizon: int) -> DerivedParams:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if spec.kind == SINGLE:
        th = spec.theta_for_index(1)
        return DerivedParams(
            horizon, (th,), th, (1,), (None,), None, None, exact_limit=True
        )
    mode = PRODUCT if spec.kind == A_TYPE else SUM
    th_hat = tuple(regularize(spec.thetas, mode, horizon, spec.arithmetic))
    th = [theta(spec.thetas, n, spec.arithmetic) for n in range(1, horizon + 1)]
    q_n = [None] + [
        math.log(n) / -math.log(float(th[n - 1])) if float(th[n - 1]) < 1 else None
        for n in range(2, horizon + 1)
    ]
    if spec.kind == A_TYPE:
        if isinstance(spec.thetas, (PowerLaw, ScaledPowerLaw)):
            q_est: Optional[float] = float(spec.thetas.q)
        else:
            finite_q = [q for q in q_n if q is not None]
            q_est = max(finite_q) if finite_q else None
        if q_est is None or math.isinf(q_est):
            p_est = 1.0
            c_n = tuple(th)
        else:
            p_est = q_est / (q_est - 1) if q_est > 1 else None
            c_n = tuple(float(th[n - 1]) * n ** (1.0 / q_est) for n in range(1, horizon + 1))
        if isinstance(spec.thetas, LogReciprocal):
            p_est = 1.0
            c_n = tuple(th)
        theta_lim = max(float(t) ** (1.0 / n) for n, t in enumerate(th, start=1))
        return DerivedParams(horizon, th_hat, theta_lim, c_n, tuple(q_n), q_est, p_est)
    # S-type: theta = lim theta_n^{1/n}; exact for geometric sequences.
    if isinstance(spec.thetas, Geometric):
        theta_lim = spec.thetas.ratio if spec.exact else float(spec.thetas.ratio)
        c_n = tuple(th[n - 1] / theta_lim**n for n in range(1, horizon + 1))
        return DerivedParams(
            horizon, th_hat, theta_lim, c_n, tuple(q_n), None, None, exact_limit=True
        )
    theta_lim = max(float(t) ** (1.0 / n) for n, t in enumerate(th, start=1))
    c_n = tuple(float(th[n - 1]) / theta_lim**n for n in range(1, horizon + 1))
    return DerivedParams(horizon, th_hat, theta_lim, c_n, tuple(q_n), None, None)


def preset(name: str) -> SpaceSpec:
    """Built-in spaces by name.

    ``tsirelson`` (T[S_1,1/2]), ``schlumprecht``, ``tzafriri:<c>``,
    ``geometric-s:<theta>``; additionally ``geometric-a:<theta>`` and
    ``ellp:<q>`` (the single-family T[A_2, 2^(-1/q)] presets) for tests.
    """
    base, _, arg = name.partition(":")
    if base == "tsirelson":
        return SpaceSpec(
            SINGLE,
            single_family=families.Sn(1),
            single_theta=Fraction(1, 2),
            name="tsirelson",
        )
    if base == "schlumprecht":
        return SpaceSpec(
            A_TYPE,
            thetas=LogReciprocal(),
            arithmetic=FLOAT64,
            name="schlumprecht",
            p_hint=1.0,
        )
    if base == "tzafriri":
        c = parse_scalar(arg) if arg else Fraction(1, 2)
        return SpaceSpec(
            A_TYPE,
            thetas=ScaledPowerLaw(float(c), 2),
            arithmetic=FLOAT64,
            name=f"tzafriri:{c}",
            p_hint=2.0,
        )
    if base == "geometric-s":
        ratio = parse_scalar(arg) if arg else Fraction(1, 2)
        return SpaceSpec(
            S_TYPE,
            thetas=Geometric(ratio),
            name=f"geometric-s:{ratio}",
        )
    if base == "geometric-a":
        ratio = parse_scalar(arg) if arg else Fraction(1, 2)
        return SpaceSpec(
            A_TYPE,
            thetas=Geometric(ratio),
            name=f"geometric-a:{ratio}",
        )
    if base == "ellp":
        q = float(parse_scalar(arg)) if arg else 2.0
        return SpaceSpec(
            SINGLE,
            single_family=families.An(2),
            single_theta=2.0 ** (-1.0 / q),
            arithmetic=FLOAT64,
            name=f"ellp:{q}",
            p_hint=q / (q - 1) if q > 1 else None,
        )
    raise ValueError(f"unknown preset {name!r}")


def parse_space_config(text: str) -> SpaceSpec:
    """Parse the key=value space configuration format."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected key = value, got {line!r}", line=lineno)
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    kind = entries.get("kind")
    if kind not in ("A", "S", "single"):
        raise ParseError(f"kind must be A, S or single, got {kind!r}")
    arithmetic = entries.get("arithmetic", RATIONAL)
    if arithmetic not in (RATIONAL, FLOAT64):
        raise ParseError(f"bad arithmetic {arithmetic!r}")
    inner_ak = int(entries["inner_ak"]) if "inner_ak" in entries else None
    if kind == "single":
        if "single_family" not in entries or "single_theta" not in entries:
            raise ParseError("single kind needs single_family and single_theta")
        fam = families.parse_family(entries["single_family"])
        th = parse_scalar(entries["single_theta"])
        return SpaceSpec(
            SINGLE,
            single_family=fam,
            single_theta=th if arithmetic == RATIONAL else float(th),
            inner_ak=inner_ak,
            arithmetic=arithmetic,
        )
    if "theta" not in entries:
        raise ParseError("A/S kinds need a theta entry")
    seq = _parse_theta_entry(entries["theta"])
    return SpaceSpec(
        A_TYPE if kind == "A" else S_TYPE,
        thetas=seq,
        inner_ak=inner_ak,
        arithmetic=arithmetic,
    )


def _parse_theta_entry(entry: str) -> ThetaSeq:
    base, _, arg = entry.partition(":")
    if base == "geometric":
        return Geometric(parse_scalar(arg))
    if base == "powerlaw":
        return PowerLaw(float(parse_scalar(arg)))
    if base == "scaledpowerlaw":
        c_text, _, q_text = arg.partition(",")
        return ScaledPowerLaw(float(parse_scalar(c_text)), float(parse_scalar(q_text)))
    if base == "logreciprocal":
        return LogReciprocal()
    if base == "explicit":
        with open(arg, "r", encoding="utf-8") as fh:
            return parse_explicit_file(fh.read())
    raise ParseError(f"unknown theta spec {entry!r}")


def parse_explicit_file(text: str) -> ExplicitSeq:
    values = []
    tail = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("tail"):
            tail = parse_scalar(line[len("tail") :])
            continue
        if tail is not None:
            raise ParseError("tail must be the final line", line=lineno)
        values.append(parse_scalar(line))
    if tail is None:
        raise ParseError("explicit file needs a final 'tail <ratio>' line")
    return ExplicitSeq(tuple(values), tail)
