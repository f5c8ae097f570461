"""Monotone iteration for the minimal singular solution.

The scheme starts from v_0 = k Gamma_0 and repeats

    v_{n+1} = G[ I_alpha[v_n^p] v_n^q ] + k Gamma_0,

where G is the Green operator of -Delta + 1.  Every term added is
nonnegative and the discrete operators preserve nodewise comparisons
exactly (nonnegative weights, identical annotation columns across
iterates), so the iterates increase monotonically up to float rounding.
They either converge to the minimal fixed point, or blow up past any
ceiling when the point source is too strong.

The barrier w_t = t k^{p+q} G[I_alpha[Phi_0^p] Phi_0^q] + k Phi_0 built
from the slower Yukawa kernel Phi_0 dominates the whole sequence whenever
the tangency inequality (c t k^{p+q-1} + 1)^{p+q} <= t admits a solution,
which pins down the guaranteed-convergence threshold k_q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .exponents import (
    CriticalityReport,
    ProblemExponents,
    classify,
    k_threshold,
    tangency_admissible,
)
from .kernels import gamma0, phi0
from .operators import (
    ExpDecay,
    OperatorMatrix,
    RadialGrid,
    RadialProfile,
    apply,
    assemble,
    pointwise_add,
    pointwise_power,
    pointwise_product,
    pointwise_scale,
)

__all__ = [
    "ProblemInstance",
    "IterationTrace",
    "SolveVerdict",
    "SolveOutcome",
    "KstarBracket",
    "SupercriticalError",
    "BarrierEstimateError",
    "gamma0_profile",
    "phi0_profile",
    "require_subcritical",
    "iterate_once",
    "barrier",
    "estimate_barrier_constant",
    "barrier_admissible",
    "solve_minimal",
    "estimate_kstar",
]

# consecutive growth steps required on top of the sup-norm ceiling before
# declaring blow-up; separates divergence from slow convergence near k*
_DIVERGENCE_RUN = 10

_CAP_FACTOR = 1e12


def _overflow_guard(s: float) -> float:
    # largest sup norm whose (p+q)-th power still fits in a float with
    # wide headroom for the operator norms; past this the verdict cannot
    # stay ambiguous and the growth-run requirement is waived
    return 10.0 ** (250.0 / s)


class SupercriticalError(ValueError):
    """The exponents sit in the nonexistence regime; iteration is refused.

    Carries the classification report so callers can name the triggering
    threshold(s).
    """

    def __init__(self, report: CriticalityReport):
        self.report = report
        names = ", ".join(report.triggers)
        super().__init__(
            f"supercritical exponents (threshold hit: {names}); no singular "
            f"solution exists in this regime and the iteration is refused")


class BarrierEstimateError(RuntimeError):
    """The barrier ratio peaked at a grid end, so its max is untrustworthy."""


def require_subcritical(exponents: ProblemExponents) -> CriticalityReport:
    report = classify(exponents)
    if report.is_supercritical:
        raise SupercriticalError(report)
    return report


# ---------------------------------------------------------------------------
# profiles of the two fundamental solutions


def gamma0_profile(N: int, grid: RadialGrid, scale: float = 1.0) -> RadialProfile:
    """scale * Gamma_0 sampled on the grid, with its exact annotations."""
    return RadialProfile(grid, scale * gamma0(N, grid.nodes),
                         origin_exponent=float(N - 2),
                         tail=ExpDecay(1.0, (N - 1) / 2.0))


def phi0_profile(N: int, grid: RadialGrid, scale: float = 1.0) -> RadialProfile:
    """scale * Phi_0 sampled on the grid; decays at half the Yukawa rate."""
    return RadialProfile(grid, scale * phi0(N, grid.nodes),
                         origin_exponent=float(N - 2),
                         tail=ExpDecay(0.5, (N - 1) / 2.0))


# ---------------------------------------------------------------------------
# problem instance


@dataclass(frozen=True)
class ProblemInstance:
    """One solve: exponents, source strength, grid, and stopping policy.

    blowup_cap defaults to 1e12 * k * Gamma_0(r_min): far above any
    converged profile (which stays within a bounded multiple of k Gamma_0)
    yet reached in a handful of doublings once the iteration actually
    blows up.
    """

    exponents: ProblemExponents
    k: float
    grid: RadialGrid
    max_iter: int = 2000
    conv_tol: float = 1e-8
    blowup_cap: Optional[float] = None

    def __post_init__(self):
        if not (np.isfinite(self.k) and self.k > 0):
            raise ValueError(f"source strength k must be positive, got {self.k}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not (np.isfinite(self.conv_tol) and self.conv_tol > 0):
            raise ValueError("conv_tol must be positive")
        # solver-grade grid: deep enough to resolve the origin power law,
        # wide enough that the exponential tail actually decays
        if self.grid.r_min > 1e-3:
            raise ValueError(
                f"solver grids need r_min <= 1e-3, got {self.grid.r_min}")
        if self.grid.r_max < 20.0:
            raise ValueError(
                f"solver grids need r_max >= 20, got {self.grid.r_max}")
        guard = _overflow_guard(float(self.exponents.p + self.exponents.q))
        if self.blowup_cap is None:
            cap = _CAP_FACTOR * self.k * float(gamma0(self.exponents.N,
                                                      self.grid.r_min))
            object.__setattr__(self, "blowup_cap", min(cap, 0.1 * guard))
        elif not self.blowup_cap > 0:
            raise ValueError("blowup_cap must be positive")
        elif self.blowup_cap >= guard:
            raise ValueError(
                f"blowup_cap {self.blowup_cap:g} exceeds the float-safe "
                f"ceiling {guard:g} for p + q = {self.exponents.p + self.exponents.q}")


def _operators(inst: ProblemInstance) -> tuple[OperatorMatrix, OperatorMatrix]:
    ex = inst.exponents
    riesz = assemble("riesz", ex.N, inst.grid, alpha=float(ex.alpha))
    green = assemble("green", ex.N, inst.grid)
    return riesz, green


# ---------------------------------------------------------------------------
# the iteration map


def _nonlinear_image(v: RadialProfile, p: float, q: float,
                     riesz: OperatorMatrix,
                     green: OperatorMatrix) -> RadialProfile:
    """G[ I_alpha[v^p] v^q ] with annotations carried through."""
    potential = apply(riesz, pointwise_power(v, p))
    return apply(green, pointwise_product(potential, pointwise_power(v, q)))


def iterate_once(v: RadialProfile, inst: ProblemInstance,
                 _ops: Optional[tuple[OperatorMatrix, OperatorMatrix]] = None,
                 ) -> RadialProfile:
    """One step v -> G[I_alpha[v^p] v^q] + k Gamma_0.

    The output is re-annotated with the source's own exponent N-2 and tail:
    the nonlinear correction is strictly milder at the origin in the
    subcritical class, so k Gamma_0 keeps the leading annotation, and
    freezing it makes every iterate share the same origin and tail columns
    (comparisons between iterates then survive rounding exactly).
    """
    riesz, green = _ops if _ops is not None else _operators(inst)
    ex = inst.exponents
    source = gamma0_profile(ex.N, inst.grid, scale=inst.k)
    if v.is_zero():
        return source
    out = pointwise_add(
        _nonlinear_image(v, float(ex.p), float(ex.q), riesz, green), source)
    return replace(out, origin_exponent=source.origin_exponent,
                   tail=source.tail)


# ---------------------------------------------------------------------------
# barrier


def estimate_barrier_constant(exponents: ProblemExponents, grid: RadialGrid,
                              _ops: Optional[tuple] = None) -> float:
    """Empirical domination constant sup_r G[I_alpha[Phi_0^p] Phi_0^q] / Phi_0.

    The ratio vanishes at both ends (the numerator's origin singularity is
    strictly weaker in the subcritical class, and its tail decays at the
    full Yukawa rate against Phi_0's half rate), so the sup must be an
    interior max; a max on the first or last node means the grid did not
    capture it and is reported as an error rather than returned.
    """
    require_subcritical(exponents)
    if _ops is None:
        riesz = assemble("riesz", exponents.N, grid, alpha=float(exponents.alpha))
        green = assemble("green", exponents.N, grid)
    else:
        riesz, green = _ops
    phi = phi0_profile(exponents.N, grid)
    core = _nonlinear_image(phi, float(exponents.p), float(exponents.q),
                            riesz, green)
    ratio = core.values / phi.values
    peak = int(np.argmax(ratio))
    if peak in (0, grid.size - 1):
        raise BarrierEstimateError(
            f"barrier ratio peaks at grid {'start' if peak == 0 else 'end'} "
            f"(r = {grid.nodes[peak]:g}); widen the grid")
    return float(ratio[peak])


def barrier(inst: ProblemInstance, t: float,
            _ops: Optional[tuple] = None) -> RadialProfile:
    """w_t = t k^{p+q} G[I_alpha[Phi_0^p] Phi_0^q] + k Phi_0."""
    if not t > 0:
        raise ValueError(f"barrier parameter t must be positive, got {t}")
    riesz, green = _ops if _ops is not None else _operators(inst)
    ex = inst.exponents
    phi = phi0_profile(ex.N, inst.grid)
    core = _nonlinear_image(phi, float(ex.p), float(ex.q), riesz, green)
    s = float(ex.p + ex.q)
    return pointwise_add(pointwise_scale(core, t * inst.k ** s),
                         phi0_profile(ex.N, inst.grid, scale=inst.k))


def barrier_admissible(inst: ProblemInstance, c_hat: float) -> bool:
    """Whether the tangency inequality closes at this k with constant c_hat."""
    ok, _ = tangency_admissible(c_hat, inst.k,
                                float(inst.exponents.p),
                                float(inst.exponents.q))
    return ok


# ---------------------------------------------------------------------------
# outcomes


class SolveVerdict(Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    MAX_ITERATIONS = "undetermined"


@dataclass(frozen=True)
class IterationTrace:
    """Per-iteration audit of the monotone scheme.

    mono_violations[n] is max_i (v_n - v_{n+1})_i / sup v_n clamped at 0;
    anything above float-rounding scale signals a weights bug.
    barrier_margins[n] is min_i (w - v_{n+1})_i when the barrier is active.
    """

    sup_norms: tuple
    rel_deltas: tuple
    mono_violations: tuple
    barrier_margins: Optional[tuple]

    @property
    def iterations(self) -> int:
        return len(self.rel_deltas)


@dataclass(frozen=True)
class SolveOutcome:
    verdict: SolveVerdict
    profile: Optional[RadialProfile]
    iterations: int
    trace: IterationTrace
    fixed_point_residual: Optional[float]
    barrier_constant: float
    k_threshold_estimate: float
    barrier_active: bool


def solve_minimal(inst: ProblemInstance) -> SolveOutcome:
    """Run the monotone iteration from v_0 = k Gamma_0 to a verdict.

    Converged: relative sup-norm delta below conv_tol; the reported
    residual re-applies the map once more, so the fixed-point defect is
    measured rather than inferred.  Diverged: sup norm beyond blowup_cap
    and still growing for 10 consecutive steps.  Otherwise the budget ran
    out and the verdict stays undetermined (near k* the scheme slows down
    without telling which side of the threshold it is on).
    """
    require_subcritical(inst.exponents)
    ops = _operators(inst)
    ex = inst.exponents

    c_hat = estimate_barrier_constant(ex, inst.grid, _ops=ops)
    k_q, t_q = k_threshold(c_hat, float(ex.p), float(ex.q))
    active = inst.k <= k_q
    w = barrier(inst, t_q, _ops=ops) if active else None

    v = gamma0_profile(ex.N, inst.grid, scale=inst.k)
    sups = [v.sup]
    deltas: list = []
    violations: list = []
    margins: list = [] if active else None
    if active:
        margins.append(float((w.values - v.values).min()))

    guard = _overflow_guard(float(ex.p + ex.q))
    growth_run = 0
    verdict = SolveVerdict.MAX_ITERATIONS
    iterations = inst.max_iter
    for n in range(1, inst.max_iter + 1):
        v_next = iterate_once(v, inst, _ops=ops)
        sup_prev, sup_next = v.sup, v_next.sup
        sups.append(sup_next)
        deltas.append(float(np.max(np.abs(v_next.values - v.values))
                            / sup_next))
        violations.append(max(0.0, float(np.max(v.values - v_next.values))
                              / sup_prev))
        if active:
            margins.append(float((w.values - v_next.values).min()))

        growth_run = growth_run + 1 if sup_next > sup_prev else 0
        v = v_next
        if deltas[-1] < inst.conv_tol:
            verdict = SolveVerdict.CONVERGED
            iterations = n
            break
        if sup_next > inst.blowup_cap and (growth_run >= _DIVERGENCE_RUN
                                           or sup_next > guard):
            verdict = SolveVerdict.DIVERGED
            iterations = n
            break

    residual = None
    profile = None
    if verdict is SolveVerdict.CONVERGED:
        profile = v
        once_more = iterate_once(v, inst, _ops=ops)
        residual = float(np.max(np.abs(once_more.values - v.values)) / v.sup)

    trace = IterationTrace(sup_norms=tuple(sups),
                           rel_deltas=tuple(deltas),
                           mono_violations=tuple(violations),
                           barrier_margins=tuple(margins) if active else None)
    return SolveOutcome(verdict=verdict,
                        profile=profile,
                        iterations=iterations,
                        trace=trace,
                        fixed_point_residual=residual,
                        barrier_constant=c_hat,
                        k_threshold_estimate=k_q,
                        barrier_active=active)


# ---------------------------------------------------------------------------
# threshold bracketing


@dataclass(frozen=True)
class KstarBracket:
    """Final bisection bracket around the existence threshold.

    k_conv is the largest k observed to converge, k_div the smallest
    observed to diverge.  evaluations lists every (k, verdict) in the order
    run.  halted_undetermined marks a sweep cut short by a budget-limited
    verdict, whose k is excluded from both endpoints.
    """

    k_conv: float
    k_div: float
    evaluations: tuple
    halted_undetermined: bool


def estimate_kstar(template: ProblemInstance, k_lo: float, k_hi: float,
                   steps: int) -> KstarBracket:
    """Bisect [k_lo, k_hi] on the solve verdict.

    Endpoints must come in with the right verdicts (k_lo converges, k_hi
    diverges); the bracket then halves per step.  A mid verdict of
    undetermined stops the sweep early rather than guessing a side.  The
    observed verdicts are audited for downward closure in k before
    returning.
    """
    if not (0 < k_lo < k_hi):
        raise ValueError(f"need 0 < k_lo < k_hi, got ({k_lo}, {k_hi})")
    if steps < 1:
        raise ValueError("steps must be at least 1")

    def run(k):
        return solve_minimal(replace(template, k=k, blowup_cap=None))

    evaluations = []
    lo_out = run(k_lo)
    evaluations.append((k_lo, lo_out.verdict))
    if lo_out.verdict is not SolveVerdict.CONVERGED:
        raise ValueError(
            f"bracket endpoint k_lo = {k_lo:g} did not converge "
            f"({lo_out.verdict.value})")
    hi_out = run(k_hi)
    evaluations.append((k_hi, hi_out.verdict))
    if hi_out.verdict is not SolveVerdict.DIVERGED:
        raise ValueError(
            f"bracket endpoint k_hi = {k_hi:g} did not diverge "
            f"({hi_out.verdict.value})")

    lo, hi = k_lo, k_hi
    halted = False
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        out = run(mid)
        evaluations.append((mid, out.verdict))
        if out.verdict is SolveVerdict.CONVERGED:
            lo = mid
        elif out.verdict is SolveVerdict.DIVERGED:
            hi = mid
        else:
            halted = True
            break

    converged_ks = [k for k, vd in evaluations if vd is SolveVerdict.CONVERGED]
    diverged_ks = [k for k, vd in evaluations if vd is SolveVerdict.DIVERGED]
    if converged_ks and diverged_ks and max(converged_ks) >= min(diverged_ks):
        raise BarrierEstimateError(
            "verdicts are not monotone in k; quadrature is untrustworthy")
    return KstarBracket(k_conv=lo, k_div=hi,
                        evaluations=tuple(evaluations),
                        halted_undetermined=halted)
