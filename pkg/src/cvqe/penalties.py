"""Penalty-coefficient formulas for symmetry-constrained optimization.

Three nested choices, each an upper bound on the previous:

* :func:`exact_coefficient` -- the tight threshold
  ``max_{i < i0} (E_i0 - E_i) / (C_i - c)^2`` from the full spectrum;
* :func:`simple_coefficient` -- ``(E_target - E_ground) / gap^2`` from two
  energies and the smallest distinct-eigenvalue gap;
* :func:`rough_coefficient` -- ``2 * sum_j |c_j| / gap^2`` from the
  Hamiltonian coefficients alone, valid for any system.

Classically-estimated energies are always caller-supplied; deliberately
perturbed oracle energies emulate over/under-estimation.  When the target
is the global ground state the max above runs over an empty set; we return
0 (any positive coefficient is valid) and let callers substitute a default.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InconsistentTarget, InvalidEstimate, NotCommuting
from .exactdiag import SectorTarget, min_distinct_gap
from .paulis import PauliSum, coefficient_norm, commutes


@dataclass(frozen=True)
class PenaltyConstraint:
    """Penalty term data: observable C, target eigenvalue, weight, gap metadata."""

    observable: PauliSum
    target: float
    coefficient: float
    min_gap: float

    def __post_init__(self):
        if self.coefficient < 0:
            raise ValueError("penalty coefficient must be >= 0")
        if self.min_gap <= 0:
            raise ValueError("distinct-eigenvalue gap must be positive")


def exact_coefficient(points, target: SectorTarget, match_tol: float = 1e-8) -> float:
    """Tight penalty threshold from the simultaneous spectrum.

    Returns 0 when the target is the global ground state (no lower-lying
    states to penalize, so any positive coefficient works).
    """
    if target.index == 0:
        return 0.0
    best = 0.0
    for point in points[: target.index]:
        gap_c = point.charge - target.charge
        if abs(gap_c) <= match_tol:
            raise InconsistentTarget(
                f"state below index {target.index} already has charge {target.charge}"
            )
        best = max(best, (target.energy - point.energy) / gap_c**2)
    return float(best)


def simple_coefficient(e_target: float, e_ground: float, min_gap: float) -> float:
    """(E_target - E_ground) / gap^2; never below the exact threshold."""
    if e_target < e_ground:
        raise InvalidEstimate(f"target energy {e_target} below ground {e_ground}")
    if min_gap <= 0:
        raise InvalidEstimate("distinct-eigenvalue gap must be positive")
    return (e_target - e_ground) / min_gap**2


def rough_coefficient(hamiltonian: PauliSum, min_gap: float) -> float:
    """2 sum_j |c_j| / gap^2, from the Pauli decomposition alone.

    Uses the bound E_target - E_ground <= 2 ||H|| <= 2 sum_j |c_j|; always
    applicable but often too large for fast convergence.
    """
    if min_gap <= 0:
        raise InvalidEstimate("distinct-eigenvalue gap must be positive")
    return 2.0 * coefficient_norm(hamiltonian) / min_gap**2


def multi_constraint_coefficients(
    constraints,
    e_target: float,
    e_ground: float,
    hamiltonian: PauliSum | None = None,
    oracle_limit: int = 12,
) -> list[PenaltyConstraint]:
    """One PenaltyConstraint per (observable, target) pair.

    Each coefficient is (E_target - E_ground) / gap_l^2 with gap_l the
    observable's own smallest distinct-eigenvalue gap.  If a Hamiltonian is
    supplied, commutation is verified first.
    """
    if e_target < e_ground:
        raise InvalidEstimate(f"target energy {e_target} below ground {e_ground}")
    out = []
    for observable, target in constraints:
        if hamiltonian is not None and not commutes(hamiltonian, observable, 1e-10):
            raise NotCommuting("constraint observable does not commute with H")
        gap = min_distinct_gap(observable, oracle_limit=oracle_limit)
        out.append(
            PenaltyConstraint(
                observable=observable,
                target=float(target),
                coefficient=(e_target - e_ground) / gap**2,
                min_gap=gap,
            )
        )
    return out


def vqd_beta_estimates(
    hamiltonian: PauliSum, e_target_estimate: float, e_ground_estimate: float
) -> tuple[float, float]:
    """Deflation-weight choices: (2 * estimated gap, 4 * sum_j |c_j|).

    The first follows the rule beta >= 2 (E_target - E_ground) with
    caller-supplied estimates; the second replaces the gap by its
    coefficient-norm upper bound.
    """
    if e_target_estimate < e_ground_estimate:
        raise InvalidEstimate(
            f"target estimate {e_target_estimate} below ground {e_ground_estimate}"
        )
    beta_estimated = 2.0 * (e_target_estimate - e_ground_estimate)
    beta_rough = 4.0 * coefficient_norm(hamiltonian)
    return beta_estimated, beta_rough
