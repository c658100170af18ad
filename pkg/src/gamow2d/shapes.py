"""Planar set representations: Fourier star shapes and pixel rasters.

StarShape carries a boundary radius r(theta) = r0*(1 + sum a_k cos k theta
+ b_k sin k theta) around a centre; RasterSet is an occupancy grid used for
cut-and-paste surgery and as the common ground for comparing arbitrary sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .errors import DomainError, PreconditionError

__all__ = [
    "StarShape",
    "RasterSet",
    "AsymmetryReport",
    "disk",
    "area",
    "perimeter",
    "scale",
    "symmetric_difference",
    "fraenkel_center",
    "rasterize",
    "cross_section",
    "raster_area",
    "raster_perimeter",
]

_VALIDATION_GRID = 2048
_DEFAULT_NODES = 4096


@dataclass(frozen=True)
class StarShape:
    """Star-shaped region with a truncated Fourier boundary.

    modes is a tuple of (k, a_k, b_k) with k >= 1.  An empty modes tuple is an
    exact disk of radius r0.
    """

    center: tuple = (0.0, 0.0)
    r0: float = 1.0
    modes: tuple = ()

    def __post_init__(self):
        if self.r0 <= 0:
            raise DomainError("base radius must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        # canonical form: one entry per mode index, zero modes dropped; the
        # closed-form area relies on distinct indices being orthogonal
        merged: dict = {}
        for k, a, b in self.modes:
            if int(k) < 1:
                raise DomainError("mode index must be >= 1")
            prev = merged.get(int(k), (0.0, 0.0))
            merged[int(k)] = (prev[0] + float(a), prev[1] + float(b))
        norm = tuple(
            (k, a, b) for k, (a, b) in sorted(merged.items())
            if a != 0.0 or b != 0.0
        )
        object.__setattr__(self, "modes", norm)
        theta = np.linspace(0.0, 2 * math.pi, _VALIDATION_GRID, endpoint=False)
        if np.min(self.radius(theta)) <= 0:
            raise DomainError("radius function must stay positive")

    def radius(self, theta):
        """r(theta), vectorized."""
        theta = np.asarray(theta, dtype=float)
        out = np.ones_like(theta)
        for k, a, b in self.modes:
            out = out + a * np.cos(k * theta) + b * np.sin(k * theta)
        return self.r0 * out

    def radius_derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for k, a, b in self.modes:
            out = out + k * (-a * np.sin(k * theta) + b * np.cos(k * theta))
        return self.r0 * out

    def boundary(self, n: int = _DEFAULT_NODES):
        """(n, 2) boundary polyline samples, uniformly in angle."""
        theta = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
        r = self.radius(theta)
        cx, cy = self.center
        return np.stack([cx + r * np.cos(theta), cy + r * np.sin(theta)], axis=1)

    def coefficients(self, n_modes: int) -> np.ndarray:
        """Dense (a_1, b_1, ..., a_K, b_K) vector, truncated or zero-padded."""
        out = np.zeros(2 * n_modes)
        for k, a, b in self.modes:
            if k <= n_modes:
                out[2 * (k - 1)] = a
                out[2 * (k - 1) + 1] = b
        return out

    def with_coefficients(self, coeffs: np.ndarray) -> "StarShape":
        modes = []
        for k in range(1, len(coeffs) // 2 + 1):
            a, b = coeffs[2 * (k - 1)], coeffs[2 * (k - 1) + 1]
            if a != 0.0 or b != 0.0:
                modes.append((k, float(a), float(b)))
        return StarShape(center=self.center, r0=self.r0, modes=tuple(modes))

    def to_json_dict(self) -> dict:
        return {
            "center": list(self.center),
            "r0": self.r0,
            "modes": [list(m) for m in self.modes],
        }

    @staticmethod
    def from_json_dict(d: dict) -> "StarShape":
        return StarShape(
            center=tuple(d.get("center", (0.0, 0.0))),
            r0=float(d["r0"]),
            modes=tuple((int(k), float(a), float(b)) for k, a, b in d.get("modes", [])),
        )


def disk(radius: float = 1.0, center=(0.0, 0.0)) -> StarShape:
    return StarShape(center=center, r0=radius, modes=())


@dataclass(frozen=True)
class RasterSet:
    """Axis-aligned occupancy grid.

    mask[i, j] covers [origin_x + i*pitch, origin_x + (i+1)*pitch) x
    [origin_y + j*pitch, ...); cell centres sit at origin + (i+.5, j+.5)*pitch.
    """

    origin: tuple
    pitch: float
    mask: np.ndarray

    def __post_init__(self):
        if self.pitch <= 0:
            raise DomainError("pitch must be positive")
        m = np.asarray(self.mask, dtype=bool)
        object.__setattr__(self, "mask", m)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    def cell_centers(self) -> np.ndarray:
        ii, jj = np.nonzero(self.mask)
        x0, y0 = self.origin
        return np.stack(
            [x0 + (ii + 0.5) * self.pitch, y0 + (jj + 0.5) * self.pitch], axis=1
        )

    def count(self) -> int:
        return int(self.mask.sum())

    def to_pgm_text(self) -> str:
        """PGM-style text serialization with an explicit geometry header."""
        lines = [
            "P1",
            f"# gamow2d-raster v1 origin={self.origin[0]!r} {self.origin[1]!r} "
            f"pitch={self.pitch!r}",
            f"{self.mask.shape[0]} {self.mask.shape[1]}",
        ]
        for row in self.mask.astype(int):
            lines.append(" ".join(str(v) for v in row))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_pgm_text(text: str) -> "RasterSet":
        lines = [ln for ln in text.strip().splitlines()]
        if not lines or lines[0].strip() != "P1":
            raise DomainError("not a raster text file")
        header = lines[1]
        if "gamow2d-raster" not in header:
            raise DomainError("missing raster geometry header")
        toks = header.replace("=", " ").split()
        ox = float(toks[toks.index("origin") + 1])
        oy = float(toks[toks.index("origin") + 2])
        pitch = float(toks[toks.index("pitch") + 1])
        nx, ny = (int(v) for v in lines[2].split())
        rows = [[bool(int(v)) for v in ln.split()] for ln in lines[3 : 3 + nx]]
        mask = np.array(rows, dtype=bool)
        if mask.shape != (nx, ny):
            raise DomainError("raster dimensions do not match header")
        return RasterSet(origin=(ox, oy), pitch=pitch, mask=mask)


@dataclass
class AsymmetryReport:
    """How far a unit-area-pi set is from the optimally translated unit disk."""

    optimal_translation: tuple
    asymmetry: float
    nu: float
    delta_plus: float
    delta_minus: float

    def to_json_dict(self) -> dict:
        return {
            "optimal_translation": list(self.optimal_translation),
            "asymmetry": self.asymmetry,
            "nu": self.nu,
            "delta_plus": self.delta_plus,
            "delta_minus": self.delta_minus,
        }


# ---------------------------------------------------------------------------
# measurements
# ---------------------------------------------------------------------------


def area(s: StarShape) -> float:
    """Enclosed area; the Fourier form makes (1/2) integral r^2 exact."""
    acc = 1.0
    for _, a, b in s.modes:
        acc += 0.5 * (a * a + b * b)
    return math.pi * s.r0 * s.r0 * acc


def perimeter(s: StarShape, n_nodes: int = _DEFAULT_NODES) -> float:
    """Boundary length by dense trapezoidal quadrature of sqrt(r^2 + r'^2)."""
    theta = np.linspace(0.0, 2 * math.pi, n_nodes, endpoint=False)
    r = s.radius(theta)
    dr = s.radius_derivative(theta)
    return float(np.sum(np.sqrt(r * r + dr * dr)) * (2 * math.pi / n_nodes))


def scale(s: StarShape, lam: float) -> StarShape:
    """Homothety about the shape centre: r0 -> lam*r0, modes unchanged."""
    if lam <= 0:
        raise DomainError("scale factor must be positive")
    return StarShape(center=s.center, r0=lam * s.r0, modes=s.modes)


def translate(s: StarShape, v) -> StarShape:
    return StarShape(center=(s.center[0] + v[0], s.center[1] + v[1]), r0=s.r0,
                     modes=s.modes)


def raster_area(r: RasterSet) -> float:
    return r.count() * r.pitch * r.pitch


def raster_perimeter(r: RasterSet) -> float:
    """Total length of exposed cell edges."""
    m = r.mask
    padded = np.pad(m, 1, constant_values=False)
    exposed = 0
    exposed += np.count_nonzero(m & ~padded[:-2, 1:-1])
    exposed += np.count_nonzero(m & ~padded[2:, 1:-1])
    exposed += np.count_nonzero(m & ~padded[1:-1, :-2])
    exposed += np.count_nonzero(m & ~padded[1:-1, 2:])
    return exposed * r.pitch


def rasterize(s: StarShape, pitch: float, padding: float = 0.0) -> RasterSet:
    """Occupancy by the cell-centre rule.

    The area error is O(pitch * perimeter); cell centres exactly on the
    boundary count as inside.
    """
    if pitch <= 0:
        raise DomainError("pitch must be positive")
    theta = np.linspace(0.0, 2 * math.pi, _VALIDATION_GRID, endpoint=False)
    rmax = float(np.max(s.radius(theta))) + padding
    cx, cy = s.center
    x0 = pitch * math.floor((cx - rmax) / pitch)
    y0 = pitch * math.floor((cy - rmax) / pitch)
    n = int(math.ceil((2 * rmax) / pitch)) + 2
    xs = x0 + (np.arange(n) + 0.5) * pitch
    ys = y0 + (np.arange(n) + 0.5) * pitch
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    ang = np.arctan2(gy - cy, gx - cx)
    rad = np.hypot(gx - cx, gy - cy)
    mask = rad <= s.radius(ang)
    return RasterSet(origin=(x0, y0), pitch=pitch, mask=mask)


def cross_section(r: RasterSet, axis: int, t: float) -> float:
    """1-D measure of the slice {x_axis = t} through the raster."""
    if axis not in (1, 2):
        raise DomainError("axis must be 1 or 2")
    x0 = r.origin[axis - 1]
    idx = int(math.floor((t - x0) / r.pitch))
    n = r.mask.shape[axis - 1]
    if idx < 0 or idx >= n:
        return 0.0
    line = r.mask[idx, :] if axis == 1 else r.mask[:, idx]
    return float(np.count_nonzero(line)) * r.pitch


# ---------------------------------------------------------------------------
# symmetric differences and Fraenkel centring
# ---------------------------------------------------------------------------


def _disk_ray_exit(w: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Distance from a point at offset w inside the unit disk to its boundary,
    along directions theta.  w is centre_of_rays - disk_centre; |w| < 1."""
    ux, uy = np.cos(theta), np.sin(theta)
    proj = w[0] * ux + w[1] * uy
    w2 = w[0] * w[0] + w[1] * w[1]
    disc = np.maximum(proj * proj - w2 + 1.0, 0.0)
    return -proj + np.sqrt(disc)


def _star_disk_intersection_area(s: StarShape, z: np.ndarray,
                                 n_nodes: int = _DEFAULT_NODES) -> float:
    """|s  intersect  (z + B)| when the shape centre lies inside z + B.

    Along every ray from the shape centre both sets cut out an interval
    [0, .], so the intersection is star-shaped about the centre and the area
    is an exact angular integral of min(r_s, rho_disk)^2 / 2.
    """
    c = np.asarray(s.center, dtype=float)
    w = c - np.asarray(z, dtype=float)
    if w @ w >= 1.0:
        return _raster_intersection_fallback(s, z)
    theta = np.linspace(0.0, 2 * math.pi, n_nodes, endpoint=False)
    r_s = s.radius(theta)
    r_d = _disk_ray_exit(w, theta)
    r = np.minimum(r_s, r_d)
    return float(0.5 * np.sum(r * r) * (2 * math.pi / n_nodes))


def _raster_intersection_fallback(s: StarShape, z, pitch: float = 1 / 256) -> float:
    ras = rasterize(s, pitch)
    pts = ras.cell_centers()
    inside = ((pts[:, 0] - z[0]) ** 2 + (pts[:, 1] - z[1]) ** 2) <= 1.0
    return float(np.count_nonzero(inside)) * pitch * pitch


def symmetric_difference(a, b, pitch: float = 1 / 128) -> float:
    """|a triangle b| for star shapes and/or rasters.

    Co-centred star shapes use the exact angular integral; a star shape
    against a unit disk uses the ray-interval reduction; anything else falls
    back to a common rasterization at the given pitch.
    """
    if isinstance(a, StarShape) and isinstance(b, StarShape):
        if a.center == b.center:
            theta = np.linspace(0.0, 2 * math.pi, _DEFAULT_NODES, endpoint=False)
            ra, rb = a.radius(theta), b.radius(theta)
            hi, lo = np.maximum(ra, rb), np.minimum(ra, rb)
            return float(0.5 * np.sum(hi * hi - lo * lo) * (2 * math.pi / _DEFAULT_NODES))
        if not b.modes and abs(b.r0 - 1.0) < 1e-15:
            inter = _star_disk_intersection_area(a, np.asarray(b.center))
            return area(a) + math.pi - 2.0 * inter
        if not a.modes and abs(a.r0 - 1.0) < 1e-15:
            inter = _star_disk_intersection_area(b, np.asarray(a.center))
            return area(b) + math.pi - 2.0 * inter
    ra = a if isinstance(a, RasterSet) else rasterize(a, pitch)
    rb = b if isinstance(b, RasterSet) else rasterize(b, pitch)
    if abs(ra.pitch - rb.pitch) > 1e-12:
        raise PreconditionError("rasters must share a pitch for set differences")
    return _raster_symmetric_difference(ra, rb)


def _raster_symmetric_difference(a: RasterSet, b: RasterSet) -> float:
    pitch = a.pitch
    off = np.array(b.origin) - np.array(a.origin)
    shift = off / pitch
    si, sj = int(round(shift[0])), int(round(shift[1]))
    if abs(shift[0] - si) > 1e-9 or abs(shift[1] - sj) > 1e-9:
        raise PreconditionError("raster grids are not aligned")
    ni = max(a.mask.shape[0], b.mask.shape[0] + si) - min(0, si)
    nj = max(a.mask.shape[1], b.mask.shape[1] + sj) - min(0, sj)
    oi, oj = -min(0, si), -min(0, sj)
    big_a = np.zeros((ni, nj), dtype=bool)
    big_b = np.zeros((ni, nj), dtype=bool)
    big_a[oi : oi + a.mask.shape[0], oj : oj + a.mask.shape[1]] = a.mask
    big_b[oi + si : oi + si + b.mask.shape[0], oj + sj : oj + sj + b.mask.shape[1]] = b.mask
    return float(np.count_nonzero(big_a ^ big_b)) * pitch * pitch


def _asymmetry_objective(s: StarShape):
    area_s = area(s)

    def f(z):
        inter = _star_disk_intersection_area(s, z)
        return area_s + math.pi - 2.0 * inter

    return f


def _centroid(s: StarShape) -> np.ndarray:
    theta = np.linspace(0.0, 2 * math.pi, _DEFAULT_NODES, endpoint=False)
    r = s.radius(theta)
    w = 2 * math.pi / _DEFAULT_NODES
    cx = np.sum(r**3 * np.cos(theta)) * w / 3.0
    cy = np.sum(r**3 * np.sin(theta)) * w / 3.0
    return np.asarray(s.center) + np.array([cx, cy]) / area(s)


def fraenkel_center(s: StarShape, step_init: float = 0.1,
                    step_tol: float = 1e-5) -> AsymmetryReport:
    """Optimal unit-disk translation and the resulting asymmetry measures.

    Pattern search from the centroid: the objective z -> |s delta (z + B)| is
    Lipschitz with constant bounded by the perimeter, so compass steps with
    halving reach the minimum at the step tolerance.
    """
    if abs(area(s) - math.pi) > 1e-8:
        raise PreconditionError("fraenkel_center expects a shape of area pi")
    f = _asymmetry_objective(s)
    z = _centroid(s)
    best = f(z)
    step = step_init
    dirs = np.array([(1, 0), (-1, 0), (0, 1), (0, -1)], dtype=float)
    while step > step_tol:
        improved = False
        for d in dirs:
            cand = z + step * d
            val = f(cand)
            if val < best - 1e-15:
                z, best = cand, val
                improved = True
                break
        if not improved:
            step *= 0.5
    asym = best
    nu = asym / 2.0
    theta = np.linspace(0.0, 2 * math.pi, _DEFAULT_NODES, endpoint=False)
    bound = s.boundary(_DEFAULT_NODES)
    dist = np.hypot(bound[:, 0] - z[0], bound[:, 1] - z[1])
    delta_plus = max(0.0, float(dist.max()) - 1.0)
    delta_minus = min(1.0, max(0.0, 1.0 - float(dist.min())))
    return AsymmetryReport(
        optimal_translation=(float(z[0]), float(z[1])),
        asymmetry=float(asym),
        nu=float(nu),
        delta_plus=delta_plus,
        delta_minus=delta_minus,
    )


def random_star_shape(rng, n_modes: int = 8, amplitude: float = 0.15,
                      target_area: float = math.pi) -> StarShape:
    """Random perturbed disk of prescribed area; mode amplitudes decay in k."""
    for _ in range(64):
        modes = []
        for k in range(1, n_modes + 1):
            a = rng.uniform(-amplitude, amplitude) / k
            b = rng.uniform(-amplitude, amplitude) / k
            modes.append((k, a, b))
        try:
            s = StarShape(center=(0.0, 0.0), r0=1.0, modes=tuple(modes))
        except DomainError:
            continue
        lam = math.sqrt(target_area / area(s))
        return scale(s, lam)
    raise RuntimeError("could not draw a valid random shape")
