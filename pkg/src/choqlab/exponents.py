"""Exact rational bookkeeping for the exponent tuple (N, alpha, p, q).

Criticality of the nonlinearity, the bootstrap ledgers that track how far a
regularity or decay exponent can be pushed per iteration, and the rate
transfer rules for the two integral operators are all decided by comparisons
that are rational in (N, alpha, p, q).  Everything in this module therefore
runs on `fractions.Fraction`; floats are rejected at the door so binary
rounding can never flip a boundary case.  The only floating point lives in
`k_threshold` and `tangency_admissible`, whose outputs are generically
irrational.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

Rational = Union[int, str, Fraction]


def as_fraction(value: Rational) -> Fraction:
    """Coerce to Fraction, rejecting floats.

    Floats carry binary rounding (Fraction(0.3) is not 3/10), which would
    silently move the criticality boundaries, so they are not accepted.
    Strings may be given as "a/b" or as exact decimals ("1.5").
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(
            f"{value!r} is not accepted here; pass an int, a Fraction, or a "
            f"string like '5/2' so the arithmetic stays exact")
    return Fraction(value)


# ---------------------------------------------------------------------------
# problem exponents and criticality


@dataclass(frozen=True)
class ProblemExponents:
    """Admissible exponent tuple: N >= 3, 0 < alpha < N, p > 0, q >= 1."""

    N: int
    alpha: Fraction
    p: Fraction
    q: Fraction

    def __post_init__(self):
        if isinstance(self.N, bool) or not isinstance(self.N, int):
            raise TypeError(f"N must be an integer, got {self.N!r}")
        if self.N < 3:
            raise ValueError(f"N must be >= 3, got {self.N}")
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "p", as_fraction(self.p))
        object.__setattr__(self, "q", as_fraction(self.q))
        if not (0 < self.alpha < self.N):
            raise ValueError(f"alpha must lie in (0, N), got {self.alpha}")
        if self.p <= 0:
            raise ValueError(f"p must be positive, got {self.p}")
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")

    @property
    def sum_threshold(self) -> Fraction:
        """(N + alpha)/(N - 2), the threshold for p + q."""
        return (self.N + self.alpha) / Fraction(self.N - 2)

    @property
    def single_threshold(self) -> Fraction:
        """N/(N - 2), the threshold for p and for q separately."""
        return Fraction(self.N, self.N - 2)


class Criticality(enum.Enum):
    SUBCRITICAL = "subcritical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class CriticalityReport:
    criticality: Criticality
    triggers: tuple[str, ...]
    sum_threshold: Fraction
    single_threshold: Fraction

    @property
    def is_supercritical(self) -> bool:
        return self.criticality is Criticality.SUPERCRITICAL


def classify(e: ProblemExponents) -> CriticalityReport:
    """Supercritical iff p+q >= (N+alpha)/(N-2) or p >= N/(N-2) or q >= N/(N-2).

    All three comparisons are non-strict: equality is supercritical.  The
    triggers tuple names every inequality that fired ("p+q", "p", "q"), in
    that fixed order, and is empty exactly when the tuple is subcritical.
    """
    triggers = []
    if e.p + e.q >= e.sum_threshold:
        triggers.append("p+q")
    if e.p >= e.single_threshold:
        triggers.append("p")
    if e.q >= e.single_threshold:
        triggers.append("q")
    crit = Criticality.SUPERCRITICAL if triggers else Criticality.SUBCRITICAL
    return CriticalityReport(crit, tuple(triggers),
                             e.sum_threshold, e.single_threshold)


def supercritical_density_exponent(e: ProblemExponents) -> tuple[Fraction, bool]:
    """Power of the nonlinear density when u has the maximal r^{2-N} profile.

    Returns ((2-N)(p+q) + alpha, locally_integrable) where local integrability
    against the volume element r^{N-1} dr means exponent > -N.
    """
    exponent = Fraction(2 - e.N) * (e.p + e.q) + e.alpha
    return exponent, exponent > -e.N


# ---------------------------------------------------------------------------
# singularity rates and their transfer through the two operators


@dataclass(frozen=True)
class SingularityRate:
    """Upper-bound class for the blow-up of a radial function at the origin.

    kind is one of "bounded", "log", "power"; a power rate carries its
    strictly positive exponent tau, meaning the function is O(r^{-tau}).
    Construct via the bounded()/log()/power() classmethods: power() with a
    nonpositive exponent normalizes to bounded, so rate arithmetic never
    produces a "power" that is actually bounded.
    """

    kind: str
    exponent: Optional[Fraction] = None

    _ORDER = {"bounded": 0, "log": 1, "power": 2}

    def __post_init__(self):
        if self.kind not in self._ORDER:
            raise ValueError(f"unknown rate kind {self.kind!r}")
        if self.kind == "power":
            if self.exponent is None or self.exponent <= 0:
                raise ValueError("power rate requires a positive exponent; "
                                 "use SingularityRate.power() to normalize")
        elif self.exponent is not None:
            raise ValueError(f"{self.kind} rate carries no exponent")

    @classmethod
    def bounded(cls) -> "SingularityRate":
        return cls("bounded")

    @classmethod
    def log(cls) -> "SingularityRate":
        return cls("log")

    @classmethod
    def power(cls, exponent: Rational) -> "SingularityRate":
        exponent = as_fraction(exponent)
        if exponent <= 0:
            return cls.bounded()
        return cls("power", exponent)

    def _key(self):
        return (self._ORDER[self.kind], self.exponent or Fraction(0))

    def __lt__(self, other):
        return self._key() < other._key()

    def __le__(self, other):
        return self._key() <= other._key()

    def __str__(self):
        if self.kind == "power":
            return f"O(r^-{self.exponent})"
        return {"bounded": "O(1)", "log": "O(log 1/r)"}[self.kind]


def _check_rate_window(rate: SingularityRate, N: int) -> None:
    if rate.kind == "power" and rate.exponent >= N:
        raise ValueError(
            f"power rate tau = {rate.exponent} is not locally integrable in "
            f"dimension N = {N}; rate transfer requires tau in (0, N)")


def green_rate(rate: SingularityRate, N: int) -> SingularityRate:
    """Origin rate of G[f] when f is O(r^-tau), tau in (0, N).

    The screened Laplacian gains two powers: tau > 2 maps to tau - 2, the
    boundary tau = 2 leaves a logarithm, and tau < 2 is absorbed entirely.
    Bounded and log inputs come out bounded.
    """
    _check_rate_window(rate, N)
    if rate.kind != "power":
        return SingularityRate.bounded()
    tau = rate.exponent
    if tau > 2:
        return SingularityRate.power(tau - 2)
    if tau == 2:
        return SingularityRate.log()
    return SingularityRate.bounded()


def riesz_rate(rate: SingularityRate, N: int, alpha: Rational) -> SingularityRate:
    """Origin rate of the order-alpha potential of an O(r^-tau) density.

    Gains alpha powers: tau > alpha maps to tau - alpha, equality to a log,
    and tau < alpha to bounded.  Requires tau < N for local integrability.
    """
    alpha = as_fraction(alpha)
    if not 0 < alpha:
        raise ValueError(f"alpha must be positive, got {alpha}")
    _check_rate_window(rate, N)
    if rate.kind != "power":
        return SingularityRate.bounded()
    tau = rate.exponent
    if tau > alpha:
        return SingularityRate.power(tau - alpha)
    if tau == alpha:
        return SingularityRate.log()
    return SingularityRate.bounded()


@dataclass(frozen=True)
class CompositeRates:
    """Per-side results of the composite transfer G[I_alpha[V^p] V^q].

    Each side is either a SingularityRate or None with the failing
    inequality recorded in the matching *_error field.  The riesz_power side
    bounds the contribution G[I_alpha[V^p]] V^q routed through the potential;
    the power side bounds G[V^{q + ...}] routed through the plain power.
    """

    riesz_power: Optional[SingularityRate]
    power: Optional[SingularityRate]
    riesz_power_error: Optional[str] = None
    power_error: Optional[str] = None


def composite_rates(e: ProblemExponents, tau: Rational,
                    t: Rational) -> CompositeRates:
    """Rate bounds for the two routes through the composite operator.

    V is O(r^-tau) with tau in (0, N-2]; t >= 1 is the splitting exponent of
    the Young pair (t = 1 is the degenerate split with conjugate infinity).
    Shared admissibility (p below N/(N-2), q strictly inside (1, N/(N-2)),
    tau in range, t >= 1) raises ValueError; the per-side integrability
    conditions (p tau - alpha) t < N and tau q t < N are reported per side
    instead of raising, since one side can be usable while the other is not.
    """
    tau = as_fraction(tau)
    t = as_fraction(t)
    if not (0 < tau <= e.N - 2):
        raise ValueError(f"tau must lie in (0, N-2], got {tau}")
    if t < 1:
        raise ValueError(f"splitting exponent t must be >= 1, got {t}")
    if e.p >= e.single_threshold:
        raise ValueError(
            f"composite transfer requires p < N/(N-2) = {e.single_threshold}, "
            f"got p = {e.p}")
    if not (1 < e.q < e.single_threshold):
        raise ValueError(
            f"composite transfer requires q in (1, N/(N-2)) = "
            f"(1, {e.single_threshold}), got q = {e.q}")

    riesz_side: Optional[SingularityRate] = None
    riesz_err: Optional[str] = None
    if (e.p * tau - e.alpha) * t < e.N:
        crossover = (e.alpha + 2 / t) / e.p
        if tau > crossover:
            riesz_side = SingularityRate.power(t * (e.p * tau - e.alpha) - 2)
        elif tau == crossover:
            riesz_side = SingularityRate.log()
        else:
            riesz_side = SingularityRate.bounded()
    else:
        riesz_err = (f"(p tau - alpha) t = {(e.p * tau - e.alpha) * t} "
                     f"must be < N = {e.N}")

    power_side: Optional[SingularityRate] = None
    power_err: Optional[str] = None
    if tau * e.q * t < e.N:
        crossover = 2 / (e.q * t)
        if tau > crossover:
            power_side = SingularityRate.power(tau * e.q * t - 2)
        elif tau == crossover:
            power_side = SingularityRate.log()
        else:
            power_side = SingularityRate.bounded()
    else:
        power_err = (f"tau q t = {tau * e.q * t} must be < N = {e.N}")

    return CompositeRates(riesz_side, power_side, riesz_err, power_err)


# ---------------------------------------------------------------------------
# bootstrap ledger


class BootstrapCase(enum.Enum):
    P_BELOW_ALPHA_CRITICAL = "p_below_alpha_critical"
    P_AT_ALPHA_CRITICAL = "p_at_alpha_critical"
    P_ABOVE_ALPHA_CRITICAL = "p_above_alpha_critical"


def bootstrap_case(e: ProblemExponents) -> BootstrapCase:
    """Position of p(N-2) relative to alpha, which decides whether the
    splitting exponent t1 exists."""
    lhs = e.p * (e.N - 2)
    if lhs > e.alpha:
        return BootstrapCase.P_ABOVE_ALPHA_CRITICAL
    if lhs == e.alpha:
        return BootstrapCase.P_AT_ALPHA_CRITICAL
    return BootstrapCase.P_BELOW_ALPHA_CRITICAL


def bootstrap_t1(e: ProblemExponents) -> tuple[Optional[Fraction], BootstrapCase]:
    """Canonical splitting exponent t1 = ((p+q)(N-2) - alpha)/(p(N-2) - alpha).

    Only defined in the p-above case; returns (None, case) otherwise.
    Supercritical tuples are rejected: the ledger machinery presumes the
    subcritical window.
    """
    report = classify(e)
    if report.is_supercritical:
        raise ValueError(
            "bootstrap ledger requires subcritical exponents; triggers: "
            + ", ".join(report.triggers))
    case = bootstrap_case(e)
    if case is not BootstrapCase.P_ABOVE_ALPHA_CRITICAL:
        return None, case
    t1 = ((e.p + e.q) * (e.N - 2) - e.alpha) / (e.p * (e.N - 2) - e.alpha)
    # balance identity: the two Young shares spend exactly the available
    # integrability, (1/t1) N/(p(N-2)-alpha) = ((t1-1)/t1)(1/q) N/(N-2)
    lhs = Fraction(e.N) / (e.p * (e.N - 2) - e.alpha) / t1
    rhs = (t1 - 1) / t1 / e.q * Fraction(e.N, e.N - 2)
    assert lhs == rhs, "balance identity violated; t1 formula is wrong"
    assert t1 > 1
    return t1, case


def s_sequence(e: ProblemExponents,
               s1: Optional[Rational] = None,
               max_steps: int = 10000) -> list[Fraction]:
    """Integrability bootstrap s_n, run in exact arithmetic.

    s_{n+1} = N s_n / ((p+q)(N - 2 s_n) - alpha s_n), starting from an s1 in
    the admissible window (defaults to its midpoint).  Terminates when the
    sequence exceeds N/2 or when p(N - 2 s) - alpha s <= 0 (the potential
    term has become bounded and no further splitting is needed).  An exact
    N/2 hit is perturbed down by a hundredth of the last gap so the
    iteration can continue through the removable boundary.
    """
    report = classify(e)
    if report.is_supercritical:
        raise ValueError(
            "s-sequence requires subcritical exponents; triggers: "
            + ", ".join(report.triggers))
    t1, case = bootstrap_t1(e)
    if t1 is None:
        raise ValueError(
            f"s-sequence needs the p-above case (p(N-2) > alpha); "
            f"got {case.value}")

    upper_growth = Fraction(e.N) / ((e.p + e.q) * (e.N - 2) - e.alpha)
    upper_positive = (e.p + e.q) * e.N / (2 * (e.p + e.q) + e.alpha)
    upper = min(upper_growth, upper_positive)
    if s1 is None:
        s1 = (1 + upper) / 2
    else:
        s1 = as_fraction(s1)
    if not s1 > 1:
        raise ValueError(f"s1 must exceed 1, got {s1}")
    if not s1 < upper_growth:
        raise ValueError(
            f"s1 must stay below N/((p+q)(N-2)-alpha) = {upper_growth}, "
            f"got {s1}")
    if (e.p + e.q) * (e.N - 2 * s1) - e.alpha * s1 <= 0:
        raise ValueError(
            f"s1 = {s1} makes the denominator (p+q)(N-2s)-alpha s "
            f"nonpositive; it must stay below {upper_positive}")

    half_n = Fraction(e.N, 2)
    seq = [s1]
    for step in range(max_steps):
        s = seq[-1]
        if s > half_n:
            break
        # the bounded-branch termination applies to elements the recursion
        # produced; from s1 itself one step is always taken (the admissible
        # window only guarantees the (p+q)-denominator there)
        if step > 0 and e.p * (e.N - 2 * s) - e.alpha * s <= 0:
            break
        s_next = e.N * s / ((e.p + e.q) * (e.N - 2 * s) - e.alpha * s)
        if s_next == half_n:
            # removable boundary: back off by a sliver and keep going
            gap = s_next - s
            s_next = s_next - gap / 100
        seq.append(s_next)
    else:
        raise RuntimeError("s-sequence failed to terminate; growth factor "
                           "should be > 1 in the p-above subcritical window")
    return seq


def T_sequence(e: ProblemExponents) -> tuple[list[Fraction], int]:
    """Decay ledger T_n and the first index n0 with T_{n0} > 0.

    T_0 = 2 - N, T_1 = 2 + alpha - (p+q)(N-2), and thereafter
    T_{n+1} = 2 + (q t1/(t1-1)) T_n.  In the p-above subcritical case the
    multiplier q t1/(t1-1) equals ((p+q)(N-2) - alpha)/(N-2) and exceeds 1,
    so the sequence escapes to +infinity and n0 is finite.
    """
    t1, case = bootstrap_t1(e)
    if t1 is None:
        raise ValueError(
            f"T-sequence needs the p-above case (p(N-2) > alpha); "
            f"got {case.value}")
    ratio = e.q * t1 / (t1 - 1)
    assert ratio == ((e.p + e.q) * (e.N - 2) - e.alpha) / Fraction(e.N - 2)
    assert ratio > 1

    T0 = Fraction(2 - e.N)
    T1 = 2 + e.alpha - (e.p + e.q) * (e.N - 2)
    assert T1 == 2 + ratio * T0, "closed form for T_1 disagrees with recursion"
    assert T1 > T0, "subcritical window should give T_1 > T_0"
    seq = [T0, T1]
    while seq[-1] <= 0:
        seq.append(2 + ratio * seq[-1])
    return seq, len(seq) - 1


@dataclass(frozen=True)
class BootstrapLedger:
    """Everything the bootstrap knows about one exponent tuple."""

    exponents: ProblemExponents
    case: BootstrapCase
    t1: Optional[Fraction]
    s_seq: tuple[Fraction, ...]
    T_seq: tuple[Fraction, ...]
    n0: Optional[int]
    n1: Optional[int]


def bootstrap_ledger(e: ProblemExponents,
                     s1: Optional[Rational] = None) -> BootstrapLedger:
    """Assemble the full ledger; sequences are empty outside the p-above case.

    n0 indexes the first positive T, n1 the first s beyond N/2 (None when the
    s-run ends on the bounded branch instead).
    """
    t1, case = bootstrap_t1(e)
    if t1 is None:
        return BootstrapLedger(e, case, None, (), (), None, None)
    s_seq = s_sequence(e, s1)
    T_seq, n0 = T_sequence(e)
    n1 = len(s_seq) - 1 if s_seq[-1] > Fraction(e.N, 2) else None
    return BootstrapLedger(e, case, t1, tuple(s_seq), tuple(T_seq), n0, n1)


# ---------------------------------------------------------------------------
# smallness threshold for the source strength


def k_threshold(c: float, p: float, q: float) -> tuple[float, float]:
    """Largest k for which the barrier tangency argument closes, with its t.

    For s = p + q > 1 and a domination constant c > 0,
    k_q = (1/(c s))^{1/(s-1)} (s-1)/s and t_q = (s/(s-1))^s; at (k_q, t_q)
    the admissibility inequality (c t k^{s-1} + 1)^s <= t holds with equality.
    """
    if not c > 0:
        raise ValueError(f"domination constant c must be positive, got {c}")
    s = float(p) + float(q)
    if not s > 1:
        raise ValueError(f"p + q must exceed 1, got {s}")
    k_q = (1.0 / (c * s)) ** (1.0 / (s - 1.0)) * (s - 1.0) / s
    t_q = (s / (s - 1.0)) ** s
    return k_q, t_q


def tangency_admissible(c: float, k: float, p: float, q: float,
                        rel_tol: float = 1e-12) -> tuple[bool, Optional[float]]:
    """Whether the barrier inequality admits some t > 1 at source strength k.

    Admissible iff c k^{s-1} <= (1/s)((s-1)/s)^{s-1} with s = p + q, up to
    rel_tol so the tangency point itself counts.  On success returns the
    canonical witness t_q; on failure (False, None).
    """
    if not c > 0:
        raise ValueError(f"domination constant c must be positive, got {c}")
    if not k >= 0:
        raise ValueError(f"source strength k must be nonnegative, got {k}")
    s = float(p) + float(q)
    if not s > 1:
        raise ValueError(f"p + q must exceed 1, got {s}")
    bound = (1.0 / s) * ((s - 1.0) / s) ** (s - 1.0)
    lhs = c * k ** (s - 1.0)
    if lhs <= bound * (1.0 + rel_tol):
        t_q = (s / (s - 1.0)) ** s
        return True, t_q
    return False, None
