"""Radial interaction kernels and their admissibility machinery.

A kernel is a radial profile g(r) > 0 acting on pair distances.  This module
owns the parametric families, the integral criteria deciding whether the
self-interaction of bounded sets is finite, monotonicity and positive
definiteness checks, the disk potential of a kernel, and the concentration
bound used to dominate cross interactions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, InsufficientDataError, PreconditionError

__all__ = [
    "DIVERGENT",
    "KernelSpec",
    "CheckReport",
    "power_kernel",
    "gauss_power_kernel",
    "indicator_kernel",
    "constant_kernel",
    "tabulated_kernel",
    "eval_kernel",
    "admissibility_integral",
    "lipschitz_integral",
    "check_decreasing",
    "check_pd_inequality",
    "check_pd_fourier",
    "potential_phi",
    "concentration_bound_phi",
    "radial_mass",
]

FAMILIES = ("power", "gauss_power", "indicator", "constant", "tabulated")

# numeric family codes shared with the compiled core
FAMILY_CODES = {"power": 0, "gauss_power": 1, "indicator": 2, "constant": 3}


class _Divergent:
    """Singleton outcome for integrals that do not converge."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DIVERGENT"

    def __bool__(self):
        return False


DIVERGENT = _Divergent()


@dataclass(frozen=True)
class KernelSpec:
    """A radial interaction kernel.

    family     one of power | gauss_power | indicator | constant | tabulated
    alpha      exponent: power uses g(r) = r**alpha, gauss_power uses
               g(r) = exp(-kappa r^2) * r**(-alpha) with 0 < alpha < dimension
    kappa      Gaussian rate >= 0 (gauss_power)
    radius     support radius > 0 (indicator)
    table      ((r_1, g_1), ...) sampled radial profile (tabulated)
    dimension  ambient dimension N >= 1
    """

    family: str
    alpha: float = 0.0
    kappa: float = 0.0
    radius: float = 1.0
    table: tuple = ()
    dimension: int = 2

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown kernel family {self.family!r}")
        if self.dimension < 1:
            raise DomainError("dimension must be a positive integer")
        if self.family == "gauss_power":
            if self.kappa < 0:
                raise DomainError("gauss_power needs kappa >= 0")
            if not (0 < self.alpha < self.dimension):
                raise DomainError("gauss_power needs 0 < alpha < dimension")
        if self.family == "indicator" and self.radius <= 0:
            raise DomainError("indicator needs a positive support radius")
        if self.family == "tabulated":
            if len(self.table) < 2:
                raise InsufficientDataError("tabulated kernel needs >= 2 samples")
            rs = np.asarray([p[0] for p in self.table], dtype=float)
            gs = np.asarray([p[1] for p in self.table], dtype=float)
            if np.any(rs <= 0) or np.any(np.diff(rs) <= 0):
                raise DomainError("tabulated radii must be positive and increasing")
            if np.any(gs < 0):
                raise DomainError("tabulated profile must be nonnegative")

    # -- profile evaluation -------------------------------------------------

    def profile(self, r):
        """Vectorized g(r) for r > 0."""
        r = np.asarray(r, dtype=float)
        if self.family == "power":
            return r**self.alpha
        if self.family == "gauss_power":
            return np.exp(-self.kappa * r * r) * r ** (-self.alpha)
        if self.family == "indicator":
            return (r <= self.radius).astype(float)
        if self.family == "constant":
            return np.ones_like(r)
        rs = np.array([p[0] for p in self.table])
        gs = np.array([p[1] for p in self.table])
        # log-linear inside the table, power-law continuation below, zero above
        out = np.interp(r, rs, gs, left=np.nan, right=0.0)
        below = r < rs[0]
        if np.any(below):
            slope = _table_tail_exponent(rs, gs)
            out = np.where(below, gs[0] * (r / rs[0]) ** slope, out)
        return out

    def is_power_family(self) -> bool:
        return self.family == "power"

    def core_params(self):
        """(family_code, a1, a2) consumed by the pair-sum backends."""
        fam = FAMILY_CODES.get(self.family)
        if fam is None:
            raise PreconditionError("tabulated kernels have no direct core path")
        if self.family == "power":
            return fam, self.alpha, 0.0
        if self.family == "gauss_power":
            return fam, self.alpha, self.kappa
        if self.family == "indicator":
            return fam, self.radius, 0.0
        return fam, 0.0, 0.0


def power_kernel(alpha: float, dimension: int = 2) -> KernelSpec:
    return KernelSpec("power", alpha=alpha, dimension=dimension)


def gauss_power_kernel(kappa: float, alpha: float, dimension: int = 2) -> KernelSpec:
    return KernelSpec("gauss_power", alpha=alpha, kappa=kappa, dimension=dimension)


def indicator_kernel(radius: float, dimension: int = 2) -> KernelSpec:
    return KernelSpec("indicator", radius=radius, dimension=dimension)


def constant_kernel(dimension: int = 2) -> KernelSpec:
    return KernelSpec("constant", dimension=dimension)


def tabulated_kernel(table: Iterable, dimension: int = 2) -> KernelSpec:
    return KernelSpec("tabulated", table=tuple((float(r), float(g)) for r, g in table),
                      dimension=dimension)


@dataclass
class CheckReport:
    """Outcome of a sampled numeric check.

    ``passed`` is true exactly when ``witnesses`` is empty; ``extremal_ratio``
    records the extreme value of the checked quantity (minimal slack, maximal
    ratio, ...) and ``samples_used`` the number of evaluations behind it.
    """

    passed: bool
    witnesses: list = field(default_factory=list)
    extremal_ratio: float = 0.0
    samples_used: int = 0
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        if self.passed != (len(self.witnesses) == 0):
            raise ValueError("passed must mirror emptiness of witnesses")

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "witnesses": self.witnesses,
            "extremal_ratio": self.extremal_ratio,
            "samples_used": self.samples_used,
            "warnings": self.warnings,
        }


# ---------------------------------------------------------------------------
# pointwise evaluation and integral criteria
# ---------------------------------------------------------------------------


def eval_kernel(k: KernelSpec, r: float) -> float:
    """g(r) for a single radius r > 0."""
    if r <= 0:
        raise DomainError("kernel is undefined at nonpositive radii")
    return float(k.profile(r))


def _table_tail_exponent(rs: np.ndarray, gs: np.ndarray) -> float:
    """Log-log slope of a tabulated profile over its smallest decade."""
    r0 = rs[0]
    sel = rs <= min(10.0 * r0, rs[-1])
    if np.count_nonzero(sel) < 2:
        raise InsufficientDataError("no samples near zero to fit a tail exponent")
    lr = np.log(rs[sel])
    lg = np.log(np.maximum(gs[sel], 1e-300))
    slope = np.polyfit(lr, lg, 1)[0]
    return float(slope)


def _weighted_unit_integral(k: KernelSpec, weight_exp: int):
    """integral_0^1 g(t) t**weight_exp dt, or DIVERGENT."""
    if k.family == "power":
        p = k.alpha + weight_exp
        if p <= -1:
            return DIVERGENT
        return 1.0 / (p + 1.0)
    if k.family == "constant":
        return 1.0 / (weight_exp + 1.0)
    if k.family == "indicator":
        top = min(1.0, k.radius)
        return top ** (weight_exp + 1) / (weight_exp + 1.0)
    if k.family == "gauss_power":
        p = -k.alpha + weight_exp
        if p <= -1:
            return DIVERGENT
        val, _ = quad(lambda t: math.exp(-k.kappa * t * t) * t**p, 0.0, 1.0,
                      points=[0.0], limit=200)
        return val
    # tabulated: decide by the fitted tail exponent, then integrate numerically
    rs = np.array([p[0] for p in k.table])
    gs = np.array([p[1] for p in k.table])
    if rs[0] > 0.1:
        raise InsufficientDataError("tabulated kernel has no samples near zero")
    slope = _table_tail_exponent(rs, gs)
    if slope + weight_exp <= -1:
        return DIVERGENT
    import warnings

    from scipy.integrate import IntegrationWarning

    with warnings.catch_warnings():
        # kinks at the table knots trip the smooth-integrand error model
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(lambda t: float(k.profile(t)) * t**weight_exp, 0.0, 1.0,
                      points=[0.0], limit=200)
    return val


def admissibility_integral(k: KernelSpec, dimension: int | None = None):
    """integral_0^1 g(t) t^(N-1) dt; finiteness characterizes admissibility."""
    n = k.dimension if dimension is None else dimension
    if n < 1:
        raise DomainError("dimension must be >= 1")
    return _weighted_unit_integral(k, n - 1)


def lipschitz_integral(k: KernelSpec, dimension: int | None = None):
    """integral_0^1 g(t) t^(N-2) dt; finiteness gives a Lipschitz disk potential."""
    n = k.dimension if dimension is None else dimension
    if n < 2:
        raise DomainError("dimension must be >= 2")
    return _weighted_unit_integral(k, n - 2)


def is_admissible(k: KernelSpec) -> bool:
    return admissibility_integral(k) is not DIVERGENT


# ---------------------------------------------------------------------------
# monotonicity
# ---------------------------------------------------------------------------


def check_decreasing(k: KernelSpec, sample_grid: Sequence[tuple]) -> CheckReport:
    """Verify g(lambda*r) <= g(r) over a grid of (r, lambda) pairs.

    This is the monotonicity the rescaling bound actually consumes.  The
    literal scaled form g(lambda*r) <= lambda*g(r) is evaluated alongside and
    reported through ``warnings`` when it fails, but does not affect the
    verdict.
    """
    grid = list(sample_grid)
    if not grid:
        raise PreconditionError("sample grid must be nonempty")
    witnesses = []
    literal_failures = []
    worst = -math.inf
    for r, lam in grid:
        if r <= 0 or lam <= 1:
            raise PreconditionError("grid entries need r > 0 and lambda > 1")
        g_r = eval_kernel(k, r)
        g_lr = eval_kernel(k, lam * r)
        if g_r > 0:
            worst = max(worst, g_lr / g_r)
        if g_lr > g_r * (1 + 1e-12) + 1e-300:
            witnesses.append({"r": r, "lambda": lam, "g_r": g_r, "g_lambda_r": g_lr})
        if g_lr > lam * g_r * (1 + 1e-12):
            literal_failures.append({"r": r, "lambda": lam})
    report = CheckReport(
        passed=not witnesses,
        witnesses=witnesses,
        extremal_ratio=worst,
        samples_used=len(grid),
    )
    if literal_failures:
        report.warnings.append(
            {"literal_scaled_monotonicity_failures": literal_failures}
        )
    return report


def default_decreasing_grid(rs=None, lams=None):
    rs = np.geomspace(1e-3, 10.0, 25) if rs is None else rs
    lams = np.linspace(1.001, 8.0, 12) if lams is None else lams
    return [(float(r), float(l)) for r in rs for l in lams]


# ---------------------------------------------------------------------------
# positive definiteness
# ---------------------------------------------------------------------------


def check_pd_inequality(
    k: KernelSpec,
    pair_source: Callable,
    n_pairs: int,
    seed: int = 0,
    tol: float = 1e-9,
) -> CheckReport:
    """Sample pairs (F, G) of rasters and test R(F) + R(G) >= 2 R(F, G).

    ``pair_source(rng)`` must return a raster pair.  Reports the minimal slack
    seen; any pair whose slack drops below -tol becomes a witness.
    """
    from .energy import riesz_interaction  # local import to avoid a cycle

    if not is_admissible(k):
        raise PreconditionError("kernel is not admissible")
    rng = np.random.default_rng(seed)
    witnesses = []
    min_slack = math.inf
    for i in range(n_pairs):
        f, g = pair_source(rng)
        slack = (
            riesz_interaction(k, f, f)
            + riesz_interaction(k, g, g)
            - 2.0 * riesz_interaction(k, f, g)
        )
        if slack < min_slack:
            min_slack = slack
        if slack < -tol:
            witnesses.append({"pair_index": i, "slack": slack})
    return CheckReport(
        passed=not witnesses,
        witnesses=witnesses,
        extremal_ratio=min_slack,
        samples_used=n_pairs,
    )


def random_blob_pair_source(pitch: float = 1 / 24, extent: float = 2.0,
                            n_disks: int = 3):
    """Factory for a generator of random raster blob pairs inside a box."""
    from .shapes import RasterSet

    def _blob(rng) -> RasterSet:
        n = int(round(2 * extent / pitch))
        xs = (np.arange(n) + 0.5) * pitch - extent
        gx, gy = np.meshgrid(xs, xs, indexing="ij")
        mask = np.zeros((n, n), dtype=bool)
        for _ in range(rng.integers(1, n_disks + 1)):
            cx, cy = rng.uniform(-extent * 0.5, extent * 0.5, size=2)
            rad = rng.uniform(0.15, 0.55)
            mask |= (gx - cx) ** 2 + (gy - cy) ** 2 <= rad * rad
        if not mask.any():
            mask[n // 2, n // 2] = True
        return RasterSet(origin=(-extent, -extent), pitch=pitch, mask=mask)

    def source(rng):
        return _blob(rng), _blob(rng)

    return source


def strip_pair_source(periods: Sequence[float] | None = None,
                      pitch: float = 1 / 16,
                      width_frac: float = 0.25,
                      height: float = 3.0):
    """Directed one-parameter family of two-strip gratings.

    F is a pair of vertical strips one period apart; G is F shifted by half a
    period.  Sweeping the period drives the spectral weight of the pair across
    the sign changes of an oscillatory kernel transform, which is how
    indicator kernels are caught violating positive definiteness.
    """
    from .shapes import RasterSet

    periods = list(periods) if periods is not None else list(np.linspace(0.9, 1.6, 15))
    state = {"i": 0}

    def _strips(x_starts, width):
        cols = []
        for s in x_starts:
            i0 = int(round(s / pitch))
            i1 = max(i0 + 1, int(round((s + width) / pitch)))
            cols.extend(range(i0, i1))
        cols = sorted(set(cols))
        ny = int(round(height / pitch))
        nx = max(cols) + 1
        mask = np.zeros((nx, ny), dtype=bool)
        for c in cols:
            mask[c, :] = True
        return RasterSet(origin=(0.0, 0.0), pitch=pitch, mask=mask)

    def source(rng):
        p = periods[state["i"] % len(periods)]
        state["i"] += 1
        w = width_frac * p
        f = _strips([0.0, p], w)
        g = _strips([p / 2, 3 * p / 2], w)
        return f, g

    return source, len(periods)


def check_pd_fourier(
    k: KernelSpec,
    window: float = 20.0,
    n: int = 512,
    tol: float = 1e-8,
) -> CheckReport:
    """Discrete surrogate for nonnegativity of the kernel transform.

    Samples g on an n x n grid over [-window/2, window/2)^2, takes the DFT and
    reports the minimal real part relative to the DC mode.  Truncation and
    discretization make this a heuristic, not a proof; a decay warning is set
    when the profile has not died off at the window edge.
    """
    if k.dimension != 2:
        raise PreconditionError("the Fourier surrogate is implemented for N = 2")
    dx = window / n
    xs = (np.arange(n) + 0.5) * dx - window / 2
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    rr = np.hypot(gx, gy)
    vals = k.profile(rr)
    if not np.all(np.isfinite(vals)):
        vals = np.nan_to_num(vals, nan=0.0, posinf=0.0)
    # undo the grid-origin phase so a symmetric profile transforms to a real ghat
    freqs = 2 * math.pi * np.fft.fftfreq(n, d=dx)
    phase = np.exp(-1j * freqs * xs[0])
    ghat = (np.fft.fft2(vals) * phase[:, None] * phase[None, :]).real * dx * dx
    dc = float(ghat[0, 0])
    scale = max(abs(dc), float(np.abs(ghat).max()), 1e-300)
    min_real = float(ghat.min())
    rel = min_real / scale
    warnings = []
    edge = float(k.profile(window / 2))
    mid = float(k.profile(max(window / 20, 1e-6)))
    if mid > 0 and edge > 1e-3 * mid:
        warnings.append("window may be too small for the kernel decay")
    passed = rel >= -tol
    witnesses = []
    if not passed:
        idx = np.unravel_index(int(np.argmin(ghat)), ghat.shape)
        freq = [float(np.fft.fftfreq(n, d=dx)[i]) * 2 * math.pi for i in idx]
        witnesses.append({"frequency": freq, "min_real_part": min_real})
    report = CheckReport(
        passed=passed,
        witnesses=witnesses,
        extremal_ratio=rel,
        samples_used=n * n,
    )
    report.warnings.extend(warnings)
    return report


# ---------------------------------------------------------------------------
# radial mass, disk potential, concentration bound (N = 2)
# ---------------------------------------------------------------------------


def radial_mass(k: KernelSpec, rho: float) -> float:
    """H(rho) = integral_0^rho g(r) r dr (planar radial mass of the kernel)."""
    if rho < 0:
        raise DomainError("radius must be nonnegative")
    if rho == 0.0:
        return 0.0
    if k.family == "power":
        p = k.alpha + 2.0
        if p <= 0:
            raise PreconditionError("kernel is not admissible in the plane")
        return rho**p / p
    if k.family == "constant":
        return rho * rho / 2.0
    if k.family == "indicator":
        top = min(rho, k.radius)
        return top * top / 2.0
    val, _ = quad(lambda r: float(k.profile(r)) * r, 0.0, rho, points=[0.0], limit=200)
    return val


def potential_phi(k: KernelSpec, t: float, rel_tol: float = 1e-9) -> float:
    """Potential of the unit disk at distance t from its centre.

    Phi(t) = integral over the unit disk of g(|y - x|) dx with |y| = t,
    reduced to one radial integral against the arc measure of circles around
    y clipped to the disk.  Decreasing in t; finite for admissible kernels.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    if not is_admissible(k):
        raise PreconditionError("kernel is not admissible")
    if k.family == "constant":
        return math.pi
    if t == 0.0:
        return 2 * math.pi * radial_mass(k, 1.0)

    lo, hi = abs(1.0 - t), 1.0 + t
    full = 2 * math.pi * radial_mass(k, lo) if t < 1.0 else 0.0

    def arc_angle(r):
        c = (t * t + r * r - 1.0) / (2.0 * t * r)
        c = min(1.0, max(-1.0, c))
        return 2.0 * math.acos(c)

    def integrand(r):
        return float(k.profile(r)) * r * arc_angle(r)

    val, err = quad(integrand, lo, hi, limit=400,
                    epsabs=1e-13, epsrel=rel_tol)
    total = full + val
    if total > 0 and err > 100 * max(rel_tol * abs(total), 1e-12):
        from .errors import QuadratureError

        raise QuadratureError(
            f"disk potential quadrature error {err:g} above tolerance", estimate=total
        )
    return total


def concentration_bound_phi(k: KernelSpec, sigma: float) -> float:
    """phi(sigma): the largest mass a set of area sigma can see from one point.

    For a radial decreasing kernel the extremal set is the centred disk of
    area sigma, so phi(sigma) = 2 pi H(sqrt(sigma/pi)).  Increasing in sigma
    and vanishing at 0.
    """
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    if not is_admissible(k):
        raise PreconditionError("kernel is not admissible")
    report = check_decreasing(k, default_decreasing_grid())
    if not report.passed:
        raise PreconditionError("kernel is not decreasing")
    r = math.sqrt(sigma / math.pi)
    return 2 * math.pi * radial_mass(k, r)


def kernel_table(k: KernelSpec, step: float, r_max: float) -> np.ndarray:
    """Radial lookup table g(i*step), i = 0..ceil(r_max/step)+1; slot 0 unused."""
    n = int(math.ceil(r_max / step)) + 2
    rs = np.arange(n, dtype=float) * step
    vals = np.empty(n, dtype=float)
    vals[0] = 0.0
    vals[1:] = k.profile(rs[1:])
    return vals


def cell_averaged_value(k: KernelSpec, pitch: float) -> float:
    """Mean of g over one grid cell, via the equal-area disk around its centre."""
    a = pitch / math.sqrt(math.pi)
    return 2 * math.pi * radial_mass(k, a) / (pitch * pitch)
