"""Cost functions for plain and symmetry-constrained VQE/VQD.

Two penalty forms are supported:

* ``PenaltyForm.OPERATOR`` adds ``mu_l <(C_l - c_l)^2>`` per constraint
  (the squared *operator* measured once); the shifted squares are built at
  spec construction and cached.
* ``PenaltyForm.EXPECTATION`` adds ``mu_l (<C_l> - c_l)^2`` (the squared
  deviation of the measured expectation).

Deflation terms ``beta_i |<psi_i|psi>|^2`` target excited states.  With a
depolarizing noise model attached, Hamiltonian and constraint expectations
go through the depolarized channel; overlap terms stay on the pure ansatz
state (the noise analysis covers operator expectations only, and widening
it further would be guesswork).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import DimensionMismatch, PenaltyFormError
from .paulis import PauliSum, square_shifted, trace
from .penalties import PenaltyConstraint
from .simulator import NoiseModel, StateVector, expectation, noisy_expectation, overlap_sq


class PenaltyForm(enum.Enum):
    OPERATOR = "operator"
    EXPECTATION = "expectation"


@dataclass(frozen=True)
class CostSpec:
    """Immutable description of one cost function; reentrant to evaluate."""

    hamiltonian: PauliSum
    constraints: tuple[PenaltyConstraint, ...] = ()
    form: PenaltyForm = PenaltyForm.OPERATOR
    deflation: tuple[tuple[StateVector, float], ...] = ()
    noise: NoiseModel | None = None
    penalty_operators: tuple[PauliSum, ...] = field(init=False, repr=False, compare=False)
    _ops_per_eval: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "deflation", tuple(self.deflation))
        n = self.hamiltonian.qubit_count
        for constraint in self.constraints:
            if constraint.observable.qubit_count != n:
                raise DimensionMismatch("constraint observable qubit count differs from H")
        for state, beta in self.deflation:
            if state.qubit_count != n:
                raise DimensionMismatch("deflation state qubit count differs from H")
            if beta <= 0:
                raise ValueError("deflation weights must be positive")
        squares = tuple(
            square_shifted(constraint.observable, constraint.target)
            for constraint in self.constraints
        )
        object.__setattr__(self, "penalty_operators", squares)
        count = self.hamiltonian.non_identity_term_count()
        if self.form is PenaltyForm.OPERATOR:
            count += sum(square.non_identity_term_count() for square in squares)
        else:
            count += sum(
                constraint.observable.non_identity_term_count()
                for constraint in self.constraints
            )
        object.__setattr__(self, "_ops_per_eval", count + len(self.deflation))

    @property
    def qubit_count(self) -> int:
        return self.hamiltonian.qubit_count

    def _expect(self, op: PauliSum, state: StateVector) -> float:
        if self.noise is not None:
            return noisy_expectation(op, state, self.noise)
        return expectation(op, state)


@dataclass(frozen=True)
class CostBreakdown:
    total: float
    energy_part: float
    penalty_parts: tuple[float, ...]
    deflation_part: float
    pauli_ops_per_eval: int


def _deflation_part(spec: CostSpec, state: StateVector) -> float:
    return sum(beta * overlap_sq(prev, state) for prev, beta in spec.deflation)


def evaluate_operator_penalty(spec: CostSpec, state: StateVector) -> CostBreakdown:
    """<H> + sum_l mu_l <(C_l - c_l)^2> + deflation."""
    if spec.form is not PenaltyForm.OPERATOR:
        raise PenaltyFormError("spec uses the squared-expectation form")
    energy = spec._expect(spec.hamiltonian, state)
    penalties = tuple(
        constraint.coefficient * spec._expect(square, state)
        for constraint, square in zip(spec.constraints, spec.penalty_operators)
    )
    deflation = _deflation_part(spec, state)
    total = energy + sum(penalties) + deflation
    return CostBreakdown(total, energy, penalties, deflation, pauli_ops_per_eval(spec))


def evaluate_expectation_penalty(spec: CostSpec, state: StateVector) -> CostBreakdown:
    """<H> + sum_l mu_l (<C_l> - c_l)^2 + deflation (expectations squared after noise)."""
    if spec.form is not PenaltyForm.EXPECTATION:
        raise PenaltyFormError("spec uses the squared-operator form")
    energy = spec._expect(spec.hamiltonian, state)
    penalties = tuple(
        constraint.coefficient
        * (spec._expect(constraint.observable, state) - constraint.target) ** 2
        for constraint in spec.constraints
    )
    deflation = _deflation_part(spec, state)
    total = energy + sum(penalties) + deflation
    return CostBreakdown(total, energy, penalties, deflation, pauli_ops_per_eval(spec))


def evaluate_cost(spec: CostSpec, state: StateVector) -> CostBreakdown:
    if spec.form is PenaltyForm.OPERATOR:
        return evaluate_operator_penalty(spec, state)
    return evaluate_expectation_penalty(spec, state)


def pauli_ops_per_eval(spec: CostSpec) -> int:
    """Distinct non-identity Pauli terms measured per cost evaluation.

    Identity terms are constants and need no measurement; each deflation
    overlap counts as one measured quantity.  The operator form pays for
    the terms of every (C - c)^2, the expectation form only for C itself,
    which is where its measurement advantage comes from.
    """
    return spec._ops_per_eval


def depolarized_offset(spec: CostSpec) -> float:
    """The constant K with noisy total = (1-p) * noiseless + p * K + deflation.

    K = [tr(H) + sum_l mu_l tr((C_l - c_l)^2)] / 2^n for the operator form;
    parameter-independent, hence the argmin is noise-invariant.
    """
    if spec.form is not PenaltyForm.OPERATOR:
        raise PenaltyFormError("offset identity applies to the squared-operator form")
    dim = 2**spec.qubit_count
    total = trace(spec.hamiltonian)
    for constraint, square in zip(spec.constraints, spec.penalty_operators):
        total += constraint.coefficient * trace(square)
    return total / dim
