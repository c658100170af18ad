"""Exact circular-arc geometry near the unit circle.

Three constructions live here: the two-arc lens family through a displaced
apex (with its derivative identities and length-area inequality), the
minimal-length boundary curves enclosing a prescribed excess or deficit area
at a prescribed maximal offset, and the perimeter-deficit ratio of a
near-disk shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy.optimize import brentq

from .errors import DomainError, FeasibilityError, RangeError
from .shapes import StarShape, area, fraenkel_center, perimeter

__all__ = [
    "LensState",
    "MinCurveResult",
    "lens_state",
    "lens_derivatives",
    "lens_inequality_check",
    "lens_from_area",
    "mu_prime_at_flat",
    "min_curve_outer",
    "min_curve_inner",
    "deficit_ratio",
]

_GUARD = 1e-9


@dataclass(frozen=True)
class LensState:
    """Circle through P = (cos tb, sin tb), Q = (cos tb, -sin tb) and
    S = (1 + delta, 0), centre on the symmetry axis.

    eta is the centre abscissa, rho the radius, theta the half-opening angle
    at the centre, tau the arc length through S, mu the signed area between
    this arc and the unit arc through (1, 0).  rho and theta are carried with
    a common sign flip when S falls on the far side of the chord PQ
    (delta < cos tb - 1); that convention keeps eta + rho = 1 + delta,
    rho sin theta = sin tb, tau = 2 rho theta and the area formula valid on
    both sides of the flat configuration.
    """

    theta_bar: float
    delta: float
    eta: float
    rho: float
    theta: float
    tau: float
    mu: float


@dataclass(frozen=True)
class MinCurveResult:
    """Minimal-length boundary curve at offset t enclosing area excess/deficit beta."""

    t: float
    beta: float
    length: float
    contact_angle: float
    t_eff: float
    case_tag: str


def _check_lens_domain(theta_bar: float, delta: float):
    if not (0.0 < theta_bar <= math.pi / 2):
        raise DomainError("theta_bar must lie in (0, pi/2]")
    bound = math.cos(theta_bar) / 8.0
    if abs(delta) > max(bound - _GUARD, 0.0):
        raise DomainError("delta must satisfy |delta| < cos(theta_bar)/8")
    if abs(1.0 + delta - math.cos(theta_bar)) < _GUARD:
        raise DomainError("flat-chord configuration is excluded (radius diverges)")


def _lens_geometry(theta_bar: float, delta: float) -> LensState:
    """Three-point-circle state without the |delta| < cos(tb)/8 restriction.

    Valid for any delta > -1 away from the flat chord; used internally for
    the extended family (one-sided slopes at the flat configuration)."""
    ct, st = math.cos(theta_bar), math.sin(theta_bar)
    eta = ((1.0 + delta) ** 2 - 1.0) / (2.0 * (1.0 + delta - ct))
    rho = 1.0 + delta - eta
    phi_p = math.atan2(st, ct - eta)
    theta = phi_p if rho > 0 else -(math.pi - phi_p)
    tau = 2.0 * rho * theta
    # mu = rho^2 theta + eta sin tb - tb, rewritten via rho sin theta = sin tb
    # to avoid the rho -> inf cancellation near the flat configuration
    mu = rho * rho * (theta - math.sin(theta)) + (1.0 + delta) * st - theta_bar
    return LensState(
        theta_bar=theta_bar, delta=delta, eta=eta, rho=rho, theta=theta,
        tau=tau, mu=mu,
    )


def lens_state(theta_bar: float, delta: float) -> LensState:
    """Solve the three-point circle and derived arc quantities."""
    _check_lens_domain(theta_bar, delta)
    return _lens_geometry(theta_bar, delta)


def lens_derivatives(theta_bar: float, delta: float):
    """(rho', theta', tau', mu') with respect to delta, in closed form.

    The arc lengths are linear in the radius, the area quadratic and the
    angle invariant, which turns the flat-configuration expansion into exact
    expressions at the current (theta, rho).
    """
    st = lens_state(theta_bar, delta)
    c = math.cos(st.theta)
    denom = 1.0 - c
    rho_p = -c / denom
    theta_p = math.sin(st.theta) / (st.rho * denom)
    tau_p = 2.0 * (math.sin(st.theta) - st.theta * c) / denom
    mu_p = st.rho * tau_p
    return rho_p, theta_p, tau_p, mu_p


def lens_inequality_check(theta_bar: float, delta: float) -> float:
    """Slack of tau(delta) - tau(0) >= mu (1 + cos(tb)/6 * delta)."""
    st = lens_state(theta_bar, delta)
    tau0 = 2.0 * theta_bar
    return st.tau - tau0 - st.mu * (1.0 + math.cos(theta_bar) / 6.0 * delta)


def _mu_of(theta_bar: float, delta: float) -> float:
    d1 = math.cos(theta_bar) - 1.0
    if abs(delta - d1) < _GUARD:
        # removable point: arc degenerates to the chord
        return math.cos(theta_bar) * math.sin(theta_bar) - theta_bar
    return lens_state(theta_bar, delta).mu


def lens_from_area(theta_bar: float, mu_target: float, tol: float = 1e-12) -> float:
    """Invert delta -> mu by bisection; mu is strictly increasing on the domain."""
    if not (0.0 < theta_bar < math.pi / 2):
        raise DomainError("inversion needs theta_bar in (0, pi/2)")
    bound = math.cos(theta_bar) / 8.0
    lo, hi = -bound + 2 * _GUARD, bound - 2 * _GUARD
    mu_lo, mu_hi = _mu_of(theta_bar, lo), _mu_of(theta_bar, hi)
    if not (mu_lo <= mu_target <= mu_hi):
        raise RangeError(
            f"target area {mu_target:g} outside attainable range "
            f"[{mu_lo:g}, {mu_hi:g}]"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _mu_of(theta_bar, mid) < mu_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mu_prime_at_flat(theta_bar: float, check: bool = True) -> float:
    """d mu / d delta at the flat configuration delta_1 = cos(tb) - 1.

    Returns (4/3) sin(tb); when ``check`` is set the value is cross-checked
    against a one-sided difference of the extended family just above delta_1
    (which lies outside the lens domain proper, hence the unchecked path).
    """
    if not (0.0 < theta_bar <= math.pi / 2):
        raise DomainError("theta_bar must lie in (0, pi/2]")
    value = 4.0 / 3.0 * math.sin(theta_bar)
    if check:
        d1 = math.cos(theta_bar) - 1.0
        h = 1e-5
        mu0 = math.cos(theta_bar) * math.sin(theta_bar) - theta_bar
        mu1 = _lens_geometry(theta_bar, d1 + h).mu
        fd = (mu1 - mu0) / h
        if abs(fd - value) > 1e-3 * max(1.0, abs(value)):
            raise RuntimeError(
                f"flat-slope cross-check failed: closed form {value:g}, fd {fd:g}"
            )
    return value


# ---------------------------------------------------------------------------
# minimal curves at prescribed offset and area
# ---------------------------------------------------------------------------


def _arc_path_area(c, r, phi0, phi1) -> float:
    """(1/2) integral of (x dy - y dx) along the arc around c from phi0 to phi1."""
    dphi = phi1 - phi0
    return 0.5 * (
        r * r * dphi
        + r * (c[0] * (math.sin(phi1) - math.sin(phi0))
               + c[1] * (math.cos(phi0) - math.cos(phi1)))
    )


def _wrap_pi(angle: float) -> float:
    while angle > math.pi:
        angle -= 2 * math.pi
    while angle < -math.pi:
        angle += 2 * math.pi
    return angle


def _free_arc(center, radius, endpoint_a, endpoint_b):
    """Signed sweep of the arc from endpoint_a to endpoint_b (minor arc)."""
    phi_a = math.atan2(endpoint_a[1] - center[1], endpoint_a[0] - center[0])
    phi_b = math.atan2(endpoint_b[1] - center[1], endpoint_b[0] - center[0])
    return phi_a, _wrap_pi(phi_b - phi_a)


def _outer_corner(t: float, theta: float):
    """Corner family member: arcs tangent to the unit circle at contact angle
    theta, meeting at the apex (1 + t, 0).  Returns (beta, length, sigma)."""
    denom = (1.0 + t) * math.cos(theta) - 1.0
    if abs(denom) < 1e-14:
        # the straight-segment member is a single parameter point; nudge off it
        theta += 1e-11
        denom = (1.0 + t) * math.cos(theta) - 1.0
    sigma = ((1.0 + t) ** 2 - 1.0) / (2.0 * denom)
    c = (sigma * math.cos(theta), sigma * math.sin(theta))
    R = abs(sigma - 1.0)
    T = (math.cos(theta), math.sin(theta))
    A = (1.0 + t, 0.0)
    phi0, dphi = _free_arc(c, R, T, A)
    piece = abs(_arc_path_area(c, R, phi0, phi0 + dphi))
    area_e = (math.pi - theta) + 2.0 * piece
    beta = area_e - math.pi
    length = 2.0 * (math.pi - theta) + 2.0 * R * abs(dphi)
    return beta, length, sigma


def _outer_tangent(theta: float):
    """Tangential family member: arcs tangent to the unit circle at contact
    angle theta and to the axis at (1 + t_ext, 0)."""
    sigma = 1.0 / (1.0 - math.sin(theta))
    R = sigma - 1.0
    c = (sigma * math.cos(theta), sigma * math.sin(theta))
    t_ext = sigma * math.cos(theta) - 1.0
    T = (math.cos(theta), math.sin(theta))
    P = (sigma * math.cos(theta), 0.0)
    phi0, dphi = _free_arc(c, R, T, P)
    piece = abs(_arc_path_area(c, R, phi0, phi0 + dphi))
    area_e = (math.pi - theta) + 2.0 * piece
    beta = area_e - math.pi
    arc_len = 2.0 * R * abs(dphi)
    return beta, arc_len, t_ext


def min_curve_outer(t: float, beta: float) -> MinCurveResult:
    """Shortest boundary containing the unit disk with max offset exactly t
    and excess area beta."""
    if t <= 0:
        raise FeasibilityError("offset t must be positive")
    if beta < 0:
        raise FeasibilityError("excess area must be nonnegative")
    if math.pi + beta > math.pi * (1.0 + t) ** 2 * (1.0 + _GUARD):
        raise FeasibilityError("excess area exceeds the offset-t disk")
    if beta <= 1e-14:
        return MinCurveResult(t=t, beta=0.0, length=2 * math.pi + 2 * t,
                              contact_angle=0.0, t_eff=0.0, case_tag="spike")

    # tangential bulge whose area alone is beta
    th_hi = math.pi / 2 - 1e-7
    if _outer_tangent(th_hi)[0] < beta:
        th_s = th_hi
    else:
        th_s = brentq(lambda th: _outer_tangent(th)[0] - beta, 1e-9, th_hi,
                      xtol=1e-14)
    b_s, arc_len, t_ext = _outer_tangent(th_s)
    if t_ext < t - 1e-12:
        length = 2.0 * (math.pi - th_s) + arc_len + 2.0 * (t - t_ext)
        return MinCurveResult(t=t, beta=beta, length=length,
                              contact_angle=th_s, t_eff=t_ext,
                              case_tag="tangent_spike")

    # corner regime: bisect the contact angle on [theta_c, pi); theta_c is the
    # apex-tangency angle, cos(th)/(1 - sin(th)) = 1 + t solved in closed form
    q = (1.0 + t) ** 2
    theta_c = math.asin((q - 1.0) / (q + 1.0))
    th_top = math.pi - 1e-7
    beta_top = _outer_corner(t, th_top)[0]
    if beta > beta_top:
        # detached circle pinned at the apex
        R = math.sqrt((math.pi + beta) / math.pi)
        return MinCurveResult(t=t, beta=beta, length=2 * math.pi * R,
                              contact_angle=math.pi, t_eff=t, case_tag="circle")
    lo = max(theta_c * (1.0 - 1e-9), 1e-9)
    th = brentq(lambda x: _outer_corner(t, x)[0] - beta, lo, th_top, xtol=1e-14)
    b, length, sigma = _outer_corner(t, th)
    u = (1.0 + t) * math.cos(th) - 1.0
    if abs(u) < 1e-9:
        tag = "corner_straight"
    elif u > 0:
        tag = "corner_concave"
    else:
        tag = "corner_convex"
    return MinCurveResult(t=t, beta=beta, length=length, contact_angle=th,
                          t_eff=t, case_tag=tag)


def _inner_corner(t: float, theta: float):
    sigma = (1.0 - (1.0 - t) ** 2) / (2.0 * (1.0 - (1.0 - t) * math.cos(theta)))
    c = (sigma * math.cos(theta), sigma * math.sin(theta))
    R = 1.0 - sigma
    T = (math.cos(theta), math.sin(theta))
    A = (1.0 - t, 0.0)
    phi0, dphi = _free_arc(c, R, T, A)
    piece = abs(_arc_path_area(c, R, phi0, phi0 + dphi))
    area_e = (math.pi - theta) + 2.0 * piece
    beta = math.pi - area_e
    length = 2.0 * (math.pi - theta) + 2.0 * R * abs(dphi)
    return beta, length, sigma


def _inner_tangent(theta: float):
    sigma = 1.0 / (1.0 + math.sin(theta))
    R = 1.0 - sigma
    c = (sigma * math.cos(theta), sigma * math.sin(theta))
    t_int = 1.0 - sigma * math.cos(theta)
    T = (math.cos(theta), math.sin(theta))
    P = (sigma * math.cos(theta), 0.0)
    phi0, dphi = _free_arc(c, R, T, P)
    piece = abs(_arc_path_area(c, R, phi0, phi0 + dphi))
    area_e = (math.pi - theta) + 2.0 * piece
    beta = math.pi - area_e
    arc_len = 2.0 * R * abs(dphi)
    return beta, arc_len, t_int


def min_curve_inner(t: float, beta: float) -> MinCurveResult:
    """Shortest boundary inside the unit disk with min offset exactly t and
    deficit area beta; the free arcs curve outward (positive curvature)."""
    if not (0 < t <= 1.0 + _GUARD):
        raise FeasibilityError("offset t must lie in (0, 1]")
    if beta < 0 or beta >= math.pi:
        raise FeasibilityError("deficit must lie in [0, pi)")
    if math.pi - beta < math.pi * (1.0 - t) ** 2 * (1.0 - _GUARD):
        raise FeasibilityError("deficit too small for the prescribed offset")
    if beta <= 1e-14:
        return MinCurveResult(t=t, beta=0.0, length=2 * math.pi + 2 * t,
                              contact_angle=0.0, t_eff=0.0, case_tag="spike")

    th_hi = math.pi / 2 - 1e-9
    beta_tan_max = _inner_tangent(th_hi)[0]
    if beta <= beta_tan_max:
        th_s = brentq(lambda th: _inner_tangent(th)[0] - beta, 1e-9, th_hi,
                      xtol=1e-14)
        b_s, arc_len, t_int = _inner_tangent(th_s)
        if t_int < t - 1e-12:
            length = 2.0 * (math.pi - th_s) + arc_len + 2.0 * (t - t_int)
            return MinCurveResult(t=t, beta=beta, length=length,
                                  contact_angle=th_s, t_eff=t_int,
                                  case_tag="tangent_spike")

    th_top = math.pi - 1e-7
    beta_top = _inner_corner(t, th_top)[0]
    if beta > beta_top:
        R = math.sqrt((math.pi - beta) / math.pi)
        return MinCurveResult(t=t, beta=beta, length=2 * math.pi * R,
                              contact_angle=math.pi, t_eff=t, case_tag="circle")
    # apex-tangency angle: cos(th)/(1 + sin(th)) = 1 - t in closed form
    q = (1.0 - t) ** 2
    theta_c = math.asin((1.0 - q) / (1.0 + q))
    lo = max(theta_c * (1.0 - 1e-9), 1e-9)
    th = brentq(lambda x: _inner_corner(t, x)[0] - beta, lo, th_top, xtol=1e-14)
    b, length, sigma = _inner_corner(t, th)
    return MinCurveResult(t=t, beta=beta, length=length, contact_angle=th,
                          t_eff=t, case_tag="corner")


# ---------------------------------------------------------------------------
# perimeter-deficit ratio
# ---------------------------------------------------------------------------


def deficit_ratio(s: StarShape, nu_floor: float = 1e-9) -> Optional[float]:
    """(P(E) - P(B)) / (nu (delta+ + delta-)) after Fraenkel centring.

    Returns None for disk-like inputs where the denominator degenerates.
    """
    if abs(area(s) - math.pi) > 1e-8:
        raise DomainError("deficit_ratio expects a shape of area pi")
    report = fraenkel_center(s)
    denom = report.nu * (report.delta_plus + report.delta_minus)
    if report.nu < nu_floor or denom <= 0.0:
        return None
    return (perimeter(s) - 2 * math.pi) / denom
