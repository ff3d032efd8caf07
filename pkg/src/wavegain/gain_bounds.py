"""Certified brackets for the asymptotic disturbance-to-displacement gains.

Four quantities bracket the two true gains of the damped string:
L_inf <= gamma_inf <= U_inf (sup-norm in space) and L_2 <= gamma_2 <= U_2
(L2 norm in space). Upper bounds come from closed-form estimates of the
per-mode forcing kernels; lower bounds maximize the exact periodic-response
gains over the forcing frequency. U_inf exists only where the feasibility
condition 2 < 2*mu*sigma + sigma^2*pi^2 holds; in that regime the asymptotic
gain itself is known to be finite, so L_inf is unconditional there and
conditional elsewhere.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ._numerics import refine_local_maxima
from .freq_response import (
    DampingParams,
    sup_gain_at,
    l2_stats_at,
    _sup_gain_many,
    _l2_gain_many,
)

__all__ = [
    "FrequencySearchConfig",
    "SupUpperBoundProblem",
    "ModeConstants",
    "GainBounds",
    "U2Value",
    "SupLowerBound",
    "L2LowerBound",
    "InternalConsistencyError",
    "upper_sup",
    "lower_sup",
    "mode_constants",
    "upper_l2",
    "lower_l2",
    "gain_bounds",
]

INV_SQRT3 = 1.0 / math.sqrt(3.0)
ZETA2 = math.pi * math.pi / 6.0

# A_n excess below this is absorbed into the closed-form series tail.
_TAIL_EPS = 1e-12
_CRITICAL_RTOL = 1e-9


class InternalConsistencyError(AssertionError):
    """A computed set of bounds violated an ordering that must always hold.

    Raised by gain_bounds when e.g. a lower bound exceeds its upper bound
    beyond rounding slack; this signals an implementation bug, never a
    property of the inputs.
    """


def _feasible(params: DampingParams) -> bool:
    # the regime where the sup-gain is known finite
    return 2.0 < 2.0 * params.mu * params.sigma + params.sigma ** 2 * math.pi ** 2


# ---------------------------------------------------------------------------
# frequency search configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrequencySearchConfig:
    """Search strategy for maximizing a gain curve over omega.

    The curve is sampled on a logarithmic base grid over
    [omega_min, omega_max] plus dense linear windows of the given half-width
    around each multiple of pi (the resonant spikes sit near those); every
    grid-local maximum is refined by golden section to refine_tol. Window
    scanning stops early after early_stop_windows consecutive windows whose
    maxima fall below the running best minus early_stop_slack.

    omega_max = None resolves to max(20*pi, 4/sigma).
    """

    omega_min: float = 1e-3
    omega_max: Optional[float] = None
    base_points: int = 256
    window_half_width: float = 0.5
    refine_tol: float = 1e-8
    early_stop_windows: int = 5
    early_stop_slack: float = 1e-9

    def __post_init__(self):
        if not (math.isfinite(self.omega_min) and self.omega_min > 0.0):
            raise ValueError(f"omega_min must be positive, got {self.omega_min!r}")
        if self.omega_max is not None and not (self.omega_max > self.omega_min):
            raise ValueError(
                f"omega_max must exceed omega_min, got {self.omega_max!r}")
        if self.base_points < 2:
            raise ValueError("base_points must be at least 2")
        if not (self.window_half_width > 0.0):
            raise ValueError("window_half_width must be positive")
        if not (self.refine_tol > 0.0):
            raise ValueError("refine_tol must be positive")
        if self.early_stop_windows < 1:
            raise ValueError("early_stop_windows must be at least 1")

    def resolved_omega_max(self, sigma: float) -> float:
        if self.omega_max is not None:
            return self.omega_max
        return max(20.0 * math.pi, 4.0 / sigma)


# ---------------------------------------------------------------------------
# U_inf: closed 1-D minimization over the root angle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SupUpperBoundProblem:
    """The 1-D problem whose infimum is the sup-gain upper bound.

    s is the shifted damping parameter (mu*sigma - 1)/sigma^2; the objective
    f(theta) = 1 / (sin(theta) * (1 - |s|/(s + (pi-theta)^2)))
    is finite and positive on (0, theta_max) and blows up at both ends.
    Constructible only in the feasible regime (theta_max > 0).
    """

    s: float
    theta_max: float

    @classmethod
    def from_params(cls, params: DampingParams) -> Optional["SupUpperBoundProblem"]:
        if not _feasible(params):
            return None
        s = (params.mu * params.sigma - 1.0) / params.sigma ** 2
        theta_max = math.pi - math.sqrt(abs(s) - s)  # = pi when s >= 0
        return cls(s=s, theta_max=theta_max)

    def objective(self, theta):
        theta = np.asarray(theta, dtype=float)
        gap = math.pi - theta
        denom = self.s + gap * gap
        # 1 - |s|/denom without cancellation: numerator is gap^2 for s >= 0,
        # 2s + gap^2 for s < 0
        if self.s >= 0.0:
            frac = gap * gap / denom
        else:
            frac = (2.0 * self.s + gap * gap) / denom
        out = 1.0 / (np.sin(theta) * frac)
        return float(out) if out.ndim == 0 else out


def upper_sup(params: DampingParams) -> Optional[float]:
    """Upper bound U_inf for the asymptotic sup-norm gain, or None.

    None when 2 < 2*mu*sigma + sigma^2*pi^2 fails (no finite bound is
    established there). Otherwise the infimum of the 1-D objective, located
    on a 4096-point grid and polished by golden section to 1e-10 in theta.
    The result is clamped below at 1 (the gain itself never drops below 1).
    """
    problem = SupUpperBoundProblem.from_params(params)
    if problem is None:
        return None
    thetas = np.linspace(0.0, problem.theta_max, 4098)[1:-1]
    vals = problem.objective(thetas)
    _, neg_best = refine_local_maxima(
        lambda t: -problem.objective(t), thetas, -vals, tol=1e-10)
    return max(1.0, -neg_best)


# ---------------------------------------------------------------------------
# shared spike-aware maximization over omega
# ---------------------------------------------------------------------------

def _mode_decay_rate(params: DampingParams, n: int) -> float:
    """Slowest decay exponent of mode n; sets the resonance peak width."""
    npi = n * math.pi
    k = 0.5 * (params.mu + npi * npi * params.sigma)
    disc = (k - npi) * (k + npi)
    if disc > 0.0:
        return k - math.sqrt(disc)
    return k


def _window_point_count(half_width: float, delta: float) -> int:
    # resolve the Lorentzian-like peak: spacing about a quarter of its width
    raw = int(round(2.0 * half_width / (0.25 * delta))) if delta > 0.0 else 513
    count = min(513, max(33, raw))
    return count + 1 if count % 2 == 0 else count


def _spike_search(params, search, evaluate_many, evaluate_one, limit_value):
    """Maximize a gain curve: log base grid + windows at multiples of pi.

    Returns (best_value, best_omega); best_omega = 0.0 marks the omega -> 0
    limit candidate, which is seeded first so exact ties resolve to it.
    Deterministic: fixed grids, left-to-right refinement, strict-improvement
    updates (ties keep the smaller omega).
    """
    lo = search.omega_min
    hi = search.resolved_omega_max(params.sigma)
    if not (lo < hi):
        raise ValueError(
            f"empty search range [{lo}, {hi}]; set omega_max above omega_min")

    best_w, best_v = 0.0, float(limit_value)

    def scan(xs):
        nonlocal best_w, best_v
        vals = np.asarray(evaluate_many(params, xs), dtype=float)
        w, v = refine_local_maxima(
            lambda x: evaluate_one(params, x), xs, vals, tol=search.refine_tol)
        if v > best_v:
            best_w, best_v = w, v
        return float(vals.max())

    scan(np.geomspace(lo, hi, search.base_points))

    stale = 0
    for n in range(1, math.ceil(hi / math.pi) + 1):
        center = n * math.pi
        a = max(lo, center - search.window_half_width)
        b = min(hi, center + search.window_half_width)
        if a >= b:
            continue
        count = _window_point_count(
            search.window_half_width, _mode_decay_rate(params, n))
        window_max = scan(np.linspace(a, b, count))
        if window_max < best_v - search.early_stop_slack:
            stale += 1
            if stale >= search.early_stop_windows:
                break
        else:
            stale = 0
    return best_v, best_w


class SupLowerBound(NamedTuple):
    """Lower bound for the sup-norm gain and where it was attained.

    conditional is True when the finite-gain regime is not established, in
    which case the value bounds the gain only if the gain is finite at all.
    argmax_omega = 0.0 marks the omega -> 0 limit.
    """

    value: float
    argmax_omega: float
    conditional: bool


class L2LowerBound(NamedTuple):
    """Lower bound for the L2 gain and the maximizing frequency (0.0 = limit)."""

    value: float
    argmax_omega: float


def lower_sup(params: DampingParams,
              search: Optional[FrequencySearchConfig] = None) -> SupLowerBound:
    """Lower bound L_inf: the largest per-frequency sup gain found.

    Spike-aware search (see FrequencySearchConfig); the omega -> 0 limit
    value 1 is always a candidate, so L_inf >= 1 up to rounding.
    """
    search = search or FrequencySearchConfig()
    value, argmax = _spike_search(
        params, search, _sup_gain_many, sup_gain_at, limit_value=1.0)
    return SupLowerBound(value=value, argmax_omega=argmax,
                         conditional=not _feasible(params))


def _l2_gain_one(params: DampingParams, omega: float) -> float:
    return l2_stats_at(params, omega).Q


def lower_l2(params: DampingParams,
             search: Optional[FrequencySearchConfig] = None) -> L2LowerBound:
    """Lower bound L_2: the largest per-frequency L2 gain found.

    Same search strategy as lower_sup; the omega -> 0 limit value 1/sqrt(3)
    is always a candidate.
    """
    search = search or FrequencySearchConfig()
    value, argmax = _spike_search(
        params, search, _l2_gain_many, _l2_gain_one, limit_value=INV_SQRT3)
    return L2LowerBound(value=value, argmax_omega=argmax)


# ---------------------------------------------------------------------------
# per-mode kernel amplification factors
# ---------------------------------------------------------------------------

def _amplification_array(params: DampingParams, ns) -> np.ndarray:
    """Kernel L1 amplification factor A_n for an integer array of modes.

    A_n is the ratio of the L1 norm of the forcing kernel of mode n to its
    plain integral; it exceeds 1 exactly where the kernel changes sign.
    mu*sigma >= 1 makes every kernel one-signed, so A_n = 1 identically.
    For mu*sigma < 1 the closed forms are, with k = (mu + n^2 pi^2 sigma)/2
    and w = sqrt(1 - mu*sigma):
      overdamped, n*pi*sigma >= 1:  1 + 2w (Q/P)^(k/2r),
          P = sigma(k+r) - 1, Q = sigma(k-r) - 1 (P*Q = 1 - mu*sigma), and
          A_n = 1 when Q <= 0;
      overdamped, n*pi*sigma < 1:   1 (kernel one-signed);
      underdamped:  1 + 2w exp((k/omega_n)(arccos(c) - pi))
                        / (1 - exp(-pi k/omega_n)),
          c = (2 - mu*sigma - n^2 pi^2 sigma^2)/(2w);
      near-critical (within 1e-9 relative of k = n*pi): the two-sided limit,
          1 + 2w exp(-1 - 1/w) when n*pi*sigma > 1, else 1.
    """
    ns = np.asarray(ns, dtype=float)
    sigma, mu = params.sigma, params.mu
    A = np.ones_like(ns)
    musig = mu * sigma
    if musig >= 1.0:
        return A
    w = math.sqrt(1.0 - musig)

    npi = ns * math.pi
    k = 0.5 * (mu + npi * npi * sigma)
    crit = np.abs(k - npi) < _CRITICAL_RTOL * npi

    near_plus = crit & (npi * sigma > 1.0)
    if near_plus.any():
        A[near_plus] = 1.0 + 2.0 * w * math.exp(-1.0 - 1.0 / w)

    over = (k > npi) & ~crit & (npi * sigma >= 1.0)
    if over.any():
        ko, no = k[over], npi[over]
        r = np.sqrt((ko - no) * (ko + no))
        P = sigma * (ko + r) - 1.0
        Q = sigma * (ko - r) - 1.0
        pos = Q > 0.0
        vals = np.ones_like(ko)
        vals[pos] = 1.0 + 2.0 * w * np.exp(
            (ko[pos] / (2.0 * r[pos])) * np.log(Q[pos] / P[pos]))
        A[over] = vals

    under = (k < npi) & ~crit
    if under.any():
        ku, nu = k[under], npi[under]
        wn = np.sqrt((nu - ku) * (nu + ku))
        c = (2.0 - musig - (nu * sigma) ** 2) / (2.0 * w)
        c = np.clip(c, -1.0, 1.0)  # |c| < 1 holds analytically off criticality
        A[under] = 1.0 + (2.0 * w * np.exp((ku / wn) * (np.arccos(c) - math.pi))
                          / (-np.expm1(-math.pi * ku / wn)))
    return A


@dataclass(frozen=True)
class ModeConstants:
    """Damping decomposition of one sine mode.

    Exactly one of r_n (overdamped/critical split) and omega_n (underdamped
    frequency) is set; beta_n = k_n/r_n is the overdamped power exponent.
    The regime is classified by exact comparison of mu + n^2 pi^2 sigma with
    2 n pi even when A_n is evaluated by the near-critical limit.
    """

    n: int
    k_n: float
    r_n: Optional[float]
    omega_n: Optional[float]
    regime: str
    beta_n: Optional[float]
    A_n: float


def mode_constants(params: DampingParams, n: int) -> ModeConstants:
    """Regime split, decay constants and amplification factor of mode n."""
    if int(n) != n or n < 1:
        raise ValueError(f"mode index must be a positive integer, got {n!r}")
    n = int(n)
    npi = n * math.pi
    k = 0.5 * (params.mu + npi * npi * params.sigma)
    disc = (k - npi) * (k + npi)
    A = float(_amplification_array(params, np.array([n]))[0])
    if k > npi:
        r = math.sqrt(disc)
        return ModeConstants(n=n, k_n=k, r_n=r, omega_n=None,
                             regime="overdamped", beta_n=k / r, A_n=A)
    if k == npi:
        return ModeConstants(n=n, k_n=k, r_n=0.0, omega_n=None,
                             regime="critical", beta_n=None, A_n=A)
    return ModeConstants(n=n, k_n=k, r_n=None, omega_n=math.sqrt(-disc),
                         regime="underdamped", beta_n=None, A_n=A)


# ---------------------------------------------------------------------------
# U_2: weighted series over the amplification factors
# ---------------------------------------------------------------------------

class U2Value(float):
    """The L2-gain upper bound, annotated with series truncation metadata.

    Behaves as a plain float; terms is the number of explicitly summed
    modes (0 for the exact mu*sigma >= 1 branch) and truncation_error_bound
    bounds the distance to the untruncated series value.
    """

    truncation_error_bound: float
    terms: int

    def __new__(cls, value, truncation_error_bound, terms):
        obj = super().__new__(cls, value)
        obj.truncation_error_bound = float(truncation_error_bound)
        obj.terms = int(terms)
        return obj


_CHUNK = 1_000_000


def upper_l2(params: DampingParams, _unit_factors: bool = False) -> U2Value:
    """Upper bound U_2 = (1/pi) sqrt(2 sum A_n^2/n^2) for the L2 gain.

    Exactly 1/sqrt(3) when mu*sigma >= 1 (all A_n = 1 and the series is
    zeta(2)). Otherwise the excess sum D = sum (A_n^2 - 1)/n^2 is
    accumulated in fixed chunks until A_n - 1 < 1e-12 past the last
    overdamped-onset index, and the remaining modes contribute through the
    closed-form zeta tail with the envelope A_n <= 1 + 1e-12; the induced
    error bound is recorded on the result. _unit_factors forces A_n = 1
    (consistency hook: must reproduce the exact branch bit for bit).
    """
    musig = params.mu * params.sigma
    if musig >= 1.0:
        return U2Value(INV_SQRT3, truncation_error_bound=0.0, terms=0)

    w = math.sqrt(1.0 - musig)
    n_safe = (1.0 + w) / (math.pi * params.sigma)  # last possible sign-change onset
    excess = 0.0
    harmonic2 = 0.0  # sum of n^-2 over the explicit terms
    n_terms = 0
    start = 1
    while True:
        ns = np.arange(start, start + _CHUNK, dtype=float)
        A = (np.ones_like(ns) if _unit_factors
             else _amplification_array(params, ns))
        inv2 = 1.0 / (ns * ns)
        done = (A - 1.0 < _TAIL_EPS) & (ns > n_safe)
        idx = np.argmax(done) if done.any() else None
        if idx is not None:
            ns, A, inv2 = ns[:idx + 1], A[:idx + 1], inv2[:idx + 1]
        excess += float((((A - 1.0) * (A + 1.0)) * inv2).sum())
        harmonic2 += float(inv2.sum())
        n_terms += ns.size
        if idx is not None:
            break
        start += _CHUNK

    tail = ZETA2 - harmonic2
    # (1 + eps)^2 - 1 with eps = 1e-12, rounded up
    tail_excess_bound = tail * 2.000001e-12
    value = math.sqrt(1.0 + excess / ZETA2) * INV_SQRT3
    # d/dx sqrt(1 + x/Z) <= 1/(2Z) on x >= 0, so this dominates the error
    bound = INV_SQRT3 * tail_excess_bound / (2.0 * ZETA2)
    return U2Value(value, truncation_error_bound=bound, terms=n_terms)


# ---------------------------------------------------------------------------
# aggregate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GainBounds:
    """The four bounds for one parameter pair, with search diagnostics.

    U_inf is None where no finite sup-gain bound is established; there
    L_inf_conditional is True. argmax values of 0.0 mark the omega -> 0
    limit candidates.
    """

    params: DampingParams
    L_inf: float
    L_inf_conditional: bool
    U_inf: Optional[float]
    L_2: float
    U_2: U2Value
    argmax_omega_sup: float
    argmax_omega_l2: float


def gain_bounds(params: DampingParams,
                search: Optional[FrequencySearchConfig] = None) -> GainBounds:
    """All four gain bounds, cross-checked against each other.

    Raises InternalConsistencyError if any ordering that must hold
    mathematically (lower <= upper, L_2 <= L_inf, limit floors) fails
    beyond rounding slack.
    """
    search = search or FrequencySearchConfig()
    u_inf = upper_sup(params)
    l_inf = lower_sup(params, search)
    u_2 = upper_l2(params)
    l_2 = lower_l2(params, search)

    checks = [
        (l_2.value <= u_2 + 1e-9, f"L_2={l_2.value} exceeds U_2={float(u_2)}"),
        (l_2.value <= l_inf.value + 1e-9,
         f"L_2={l_2.value} exceeds L_inf={l_inf.value}"),
        (l_2.value >= INV_SQRT3 - 1e-6,
         f"L_2={l_2.value} fell below the omega->0 limit 1/sqrt(3)"),
        (l_inf.value >= 1.0 - 1e-9,
         f"L_inf={l_inf.value} fell below the omega->0 limit 1"),
    ]
    if u_inf is not None:
        checks.append((l_inf.value <= u_inf + 1e-9,
                       f"L_inf={l_inf.value} exceeds U_inf={u_inf}"))
    for ok, msg in checks:
        if not ok:
            raise InternalConsistencyError(
                f"gain bound ordering violated for sigma={params.sigma}, "
                f"mu={params.mu}: {msg}")

    return GainBounds(params=params, L_inf=l_inf.value,
                      L_inf_conditional=l_inf.conditional, U_inf=u_inf,
                      L_2=l_2.value, U_2=u_2,
                      argmax_omega_sup=l_inf.argmax_omega,
                      argmax_omega_l2=l_2.argmax_omega)
