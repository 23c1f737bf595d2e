"""(charge, energy)-plane analysis of the squared-expectation penalty.

States reachable by an arbitrary ansatz map to the convex envelope of the
simultaneous eigenvalue points {(C_i, E_i)}.  Minimizing
``<H> + mu (<C> - c)^2`` over all states is therefore a one-dimensional
convex problem along the lower hull: for each hull edge the objective has
a per-edge closed form, and the global minimum is where the level-set
parabola ``E = -mu (C - c)^2 + f`` first touches the hull.

When the target (c, E_target) is a hull boundary point with a downhill
adjacent edge of slope ``alpha`` and the tangency lands inside that edge,
the minimum is

    (C_t, E_t) = (c - alpha/(2 mu), E_target - alpha^2/(2 mu)),
    f_min      = E_target - alpha^2/(4 mu),

so the result always undershoots the target by alpha^2/(4 mu) for finite
penalty weight.  Interior targets can never be reached for any weight.
Depolarizing noise tilts the parabola; the exact noisy minimum reduces to
the noiseless minimizer with transformed (c, mu), and the first-order
shifts in p are available in closed form.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InvalidProbability, NotBoundary, TargetNotInCloud


class EnvelopePoint(NamedTuple):
    charge: float
    energy: float


class Classification(enum.Enum):
    BOUNDARY = "boundary"
    INTERIOR = "interior"


class TangentCase(enum.Enum):
    BOUNDARY_TANGENT = "boundary_tangent"
    BOUNDARY_VERTEX = "boundary_vertex"
    INTERIOR = "interior"


@dataclass(frozen=True)
class TangentResult:
    c_t: float
    e_t: float
    f_min: float
    alpha: float
    case: TangentCase


@dataclass(frozen=True)
class RelaxationMinimum:
    """Exact minimum of <E> + mu (<C> - c)^2 over spectrum-point mixtures."""

    f_min: float
    c_opt: float
    e_opt: float
    support: tuple[tuple[EnvelopePoint, float], ...]


class OperatorPenaltyMinimum(NamedTuple):
    value: float
    index: int


def as_points(points) -> list[EnvelopePoint]:
    out = []
    for p in points:
        if hasattr(p, "charge") and hasattr(p, "energy"):
            out.append(EnvelopePoint(float(p.charge), float(p.energy)))
        else:
            c, e = p
            out.append(EnvelopePoint(float(c), float(e)))
    return out


def lower_hull(points, charge_tol: float = 1e-9) -> list[EnvelopePoint]:
    """Vertices of the lower convex boundary, sorted by ascending charge.

    Charges within ``charge_tol`` are collapsed to their minimum-energy
    representative (vertical degeneracy carries no envelope information).
    Collinear interior points are removed.
    """
    pts = sorted(as_points(points))
    if not pts:
        raise ValueError("need at least one point")
    collapsed = [pts[0]]
    for p in pts[1:]:
        if p.charge - collapsed[-1].charge <= charge_tol:
            if p.energy < collapsed[-1].energy:
                collapsed[-1] = p
        else:
            collapsed.append(p)
    hull: list[EnvelopePoint] = []
    for p in collapsed:
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (a.charge - o.charge) * (p.energy - o.energy) - (
                a.energy - o.energy
            ) * (p.charge - o.charge)
            if cross <= 0.0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def hull_energy_at(hull: list[EnvelopePoint], charge: float, atol: float = 1e-9) -> float:
    """Piecewise-linear lower-envelope energy at the given charge.

    Charges within ``atol`` of the hull ends are clamped (eigensolver
    jitter can put an exact sector label marginally outside the hull).
    """
    if charge < hull[0].charge - atol or charge > hull[-1].charge + atol:
        raise ValueError(f"charge {charge} outside hull range")
    charge = min(max(charge, hull[0].charge), hull[-1].charge)
    for a, b in zip(hull, hull[1:]):
        if charge <= b.charge:
            if b.charge == a.charge:
                return min(a.energy, b.energy)
            w = (charge - a.charge) / (b.charge - a.charge)
            return (1 - w) * a.energy + w * b.energy
    return hull[-1].energy


def classify_target(points, c: float, e_target: float, tol: float = 1e-9) -> Classification:
    """Boundary iff the target point lies on the lower hull within tol."""
    pts = as_points(points)
    if not any(abs(p.charge - c) <= tol and abs(p.energy - e_target) <= tol for p in pts):
        raise TargetNotInCloud(f"({c}, {e_target}) is not a spectrum point")
    hull = lower_hull(pts, charge_tol=min(tol, 1e-9))
    if e_target <= hull_energy_at(hull, c) + tol:
        return Classification.BOUNDARY
    return Classification.INTERIOR


def minimize_operator_penalty(points, c: float, mu: float) -> OperatorPenaltyMinimum:
    """Minimum of sum_i w_i (E_i + mu (C_i - c)^2) over the weight simplex.

    The objective is linear in the weights, so the minimum sits on a
    vertex: simply the best single spectrum point.
    """
    pts = as_points(points)
    values = [p.energy + mu * (p.charge - c) ** 2 for p in pts]
    index = min(range(len(values)), key=values.__getitem__)
    return OperatorPenaltyMinimum(float(values[index]), index)


def minimize_expectation_penalty(points, c: float, mu: float) -> RelaxationMinimum:
    """Global minimum of <E> + mu (<C> - c)^2 over spectrum-point mixtures.

    The objective depends on the weights only through (<C>, <E>), so it
    reduces to minimizing E_hull(C) + mu (C - c)^2 along the lower hull:
    per-edge closed form, vertex comparison.
    """
    if mu <= 0:
        raise ValueError("penalty weight must be positive")
    hull = lower_hull(points)
    if len(hull) == 1:
        p = hull[0]
        value = p.energy + mu * (p.charge - c) ** 2
        return RelaxationMinimum(float(value), p.charge, p.energy, ((p, 1.0),))

    best: RelaxationMinimum | None = None
    for a, b in zip(hull, hull[1:]):
        slope = (b.energy - a.energy) / (b.charge - a.charge)
        c_star = min(max(c - slope / (2.0 * mu), a.charge), b.charge)
        w = (c_star - a.charge) / (b.charge - a.charge)
        e_star = (1 - w) * a.energy + w * b.energy
        value = e_star + mu * (c_star - c) ** 2
        if best is None or value < best.f_min:
            if w <= 0.0:
                support = ((a, 1.0),)
            elif w >= 1.0:
                support = ((b, 1.0),)
            else:
                support = ((a, 1.0 - w), (b, w))
            best = RelaxationMinimum(float(value), float(c_star), float(e_star), support)
    return best


def tangent_closed_form(
    points, c: float, e_target: float, mu: float, tol: float = 1e-9
) -> TangentResult:
    """Closed-form parabola/hull tangency for a boundary target.

    Returns the tangent-point formulas when the tangency lands inside the
    downhill adjacent edge; when the parabola pins a vertex instead (small
    weight, or the target itself when it is the hull bottom), the exact
    relaxation minimum is returned with case BOUNDARY_VERTEX.
    """
    if mu <= 0:
        raise ValueError("penalty weight must be positive")
    if classify_target(points, c, e_target, tol) is not Classification.BOUNDARY:
        raise NotBoundary(f"target ({c}, {e_target}) is interior to the envelope")
    hull = lower_hull(points)

    left_slope = right_slope = None
    left_extent = right_extent = 0.0
    vertex_index = next(
        (k for k, p in enumerate(hull) if abs(p.charge - c) <= tol), None
    )
    if vertex_index is not None:
        k = vertex_index
        if k > 0:
            left_slope = _slope(hull[k - 1], hull[k])
            left_extent = c - hull[k - 1].charge
        if k < len(hull) - 1:
            right_slope = _slope(hull[k], hull[k + 1])
            right_extent = hull[k + 1].charge - c
    else:
        for a, b in zip(hull, hull[1:]):
            if a.charge < c < b.charge:
                left_slope = right_slope = _slope(a, b)
                left_extent = c - a.charge
                right_extent = b.charge - c
                break

    if left_slope is not None and left_slope > 0:
        alpha, extent = left_slope, left_extent
    elif right_slope is not None and right_slope < 0:
        alpha, extent = right_slope, right_extent
    else:
        # Target is the hull bottom: the parabola touches it exactly.
        flat = (left_slope == 0.0) or (right_slope == 0.0)
        case = TangentCase.BOUNDARY_TANGENT if flat else TangentCase.BOUNDARY_VERTEX
        return TangentResult(float(c), float(e_target), float(e_target), 0.0, case)

    if abs(alpha) / (2.0 * mu) <= extent + tol:
        return TangentResult(
            c_t=c - alpha / (2.0 * mu),
            e_t=e_target - alpha**2 / (2.0 * mu),
            f_min=e_target - alpha**2 / (4.0 * mu),
            alpha=float(alpha),
            case=TangentCase.BOUNDARY_TANGENT,
        )
    exact = minimize_expectation_penalty(points, c, mu)
    return TangentResult(
        c_t=exact.c_opt,
        e_t=exact.e_opt,
        f_min=exact.f_min,
        alpha=float(alpha),
        case=TangentCase.BOUNDARY_VERTEX,
    )


def _slope(a: EnvelopePoint, b: EnvelopePoint) -> float:
    return (b.energy - a.energy) / (b.charge - a.charge)


class NoisyMinimum(NamedTuple):
    f_min: float
    c_t: float
    e_t: float


def noisy_expectation_penalty_minimum(
    points,
    c: float,
    mu: float,
    p: float,
    trace_h_over_dim: float,
    trace_c_over_dim: float,
) -> NoisyMinimum:
    """Exact minimum of the depolarized squared-expectation cost.

    With moments taken in the depolarized state, the objective regroups to
    ``(1-p) [E_hull(C) + mu (1-p) (C - c_eff)^2] + p tr(H)/2^n`` with
    ``c_eff = (c - p tr(C)/2^n) / (1-p)``, i.e. the noiseless minimizer on
    a transformed parabola.
    """
    if not 0.0 <= p < 1.0:
        raise InvalidProbability(f"depolarizing probability {p} outside [0, 1)")
    c_eff = (c - p * trace_c_over_dim) / (1.0 - p)
    shifted = minimize_expectation_penalty(points, c_eff, mu * (1.0 - p))
    return NoisyMinimum(
        (1.0 - p) * shifted.f_min + p * trace_h_over_dim, shifted.c_opt, shifted.e_opt
    )


def noisy_tangent_first_order(
    base: TangentResult,
    p: float,
    trace_h_over_dim: float,
    trace_c_over_dim: float,
    c: float,
    e_target: float,
    mu: float,
) -> tuple[float, float, float]:
    """First-order-in-p shifts of the tangent point and minimum value.

    Traces enter pre-normalized (trace/2^n, the depolarized-state
    expectations).  The f_min shift is exact in p; the tangent-point shifts
    carry O(p^2) remainders against the exact noisy minimizer.
    """
    if not 0.0 <= p < 1.0:
        raise InvalidProbability(f"depolarizing probability {p} outside [0, 1)")
    if base.case is not TangentCase.BOUNDARY_TANGENT:
        raise NotBoundary("first-order shifts require an edge-tangent base result")
    alpha = base.alpha
    t_h, t_c = trace_h_over_dim, trace_c_over_dim
    c_t_shift = p * (c - t_c - alpha / (2.0 * mu))
    e_t_shift = p * (alpha * (c - t_c) - alpha**2 / (2.0 * mu))
    f_min_shift = p * (t_h - alpha * (t_c - c) - e_target)
    return c_t_shift, e_t_shift, f_min_shift
