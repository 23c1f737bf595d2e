"""Dense statevector simulation of the hardware-efficient ansatz.

Conventions (fixed so results reproduce bit-for-bit):

* little-endian basis indexing: bit ``k`` of an amplitude index is qubit
  ``k``;
* rotation gates ``R_Y(t) = exp(i t Y / 2)`` and ``R_Z(t) = exp(i t Z / 2)``
  (note the ``+i`` sign);
* circuit layout: one column of ``R_Y`` then ``R_Z`` on every qubit,
  followed by ``depth`` blocks of [linear-chain CZ entanglers on
  (i, i+1), i = 0..n-2] plus another rotation column;
* parameter layout: for layer ``l`` in 0..depth, ``params[2nl + q]`` is the
  ``R_Y`` angle of qubit ``q`` and ``params[2nl + n + q]`` the ``R_Z``
  angle, so ``parameter_count = 2 n (depth + 1)``.

Depolarizing noise is handled analytically on expectation values
(mixing with trace(O)/2^n), never by density-matrix simulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, InvalidProbability, ParamCountMismatch
from .paulis import PauliSum


@dataclass
class StateVector:
    """2^n complex amplitudes; bit k of the index addresses qubit k."""

    amplitudes: np.ndarray
    qubit_count: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**self.qubit_count,):
            raise DimensionMismatch(
                f"expected {2**self.qubit_count} amplitudes, got {amps.shape}"
            )
        self.amplitudes = amps

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.qubit_count)


def basis_state(bits: str | int, qubit_count: int) -> StateVector:
    """Computational basis state; string form has character k = qubit k."""
    if isinstance(bits, str):
        if len(bits) != qubit_count or set(bits) - {"0", "1"}:
            raise ValueError(f"reference bitstring {bits!r} invalid for n={qubit_count}")
        index = sum(1 << k for k, b in enumerate(bits) if b == "1")
    else:
        index = int(bits)
        if not 0 <= index < 2**qubit_count:
            raise ValueError(f"basis index {index} out of range")
    amps = np.zeros(2**qubit_count, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps, qubit_count)


@dataclass(frozen=True)
class AnsatzConfig:
    """Hardware-efficient ansatz: rotation columns separated by CZ chains."""

    qubit_count: int
    depth: int
    reference_state: str | None = None
    kind: str = "hardware_efficient"

    def __post_init__(self):
        if self.kind != "hardware_efficient":
            raise ValueError(f"unknown ansatz kind {self.kind!r}")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.qubit_count < 1:
            raise ValueError("qubit_count must be positive")

    @property
    def parameter_count(self) -> int:
        return 2 * self.qubit_count * (self.depth + 1)


@dataclass(frozen=True)
class NoiseModel:
    """Global depolarizing channel with probability p in [0, 1).

    p = 1 is excluded: the output would be parameter-independent and the
    optimization trivial.
    """

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p < 1.0:
            raise InvalidProbability(f"depolarizing probability {self.p} outside [0, 1)")


def _apply_ry(amps: np.ndarray, qubit: int, theta: float, n: int) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    view = amps.reshape(2 ** (n - 1 - qubit), 2, 2**qubit)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    # exp(i t Y / 2) = [[c, s], [-s, c]]
    view[:, 0, :] = c * a0 + s * a1
    view[:, 1, :] = -s * a0 + c * a1
    return amps


def _apply_rz(amps: np.ndarray, qubit: int, theta: float, n: int) -> np.ndarray:
    phase = np.exp(0.5j * theta)
    view = amps.reshape(2 ** (n - 1 - qubit), 2, 2**qubit)
    view[:, 0, :] *= phase
    view[:, 1, :] *= np.conj(phase)
    return amps


def _apply_cz_chain(amps: np.ndarray, n: int) -> np.ndarray:
    amps *= _cz_chain_signs(n)
    return amps


@lru_cache(maxsize=32)
def _cz_chain_signs(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    signs = np.ones(2**n)
    for i in range(n - 1):
        both = ((idx >> i) & (idx >> (i + 1)) & 1).astype(bool)
        signs[both] *= -1.0
    return signs


def prepare(ansatz: AnsatzConfig, params) -> StateVector:
    """Run the ansatz circuit on the reference state.

    Each layer's R_Y and R_Z on one qubit are fused into a single 2x2
    unitary (R_Z R_Y, i.e. R_Y applied first); tests pin the result to a
    gate-by-gate dense matrix chain at 1e-10.
    """
    params = np.asarray(params, dtype=float)
    if params.shape != (ansatz.parameter_count,):
        raise ParamCountMismatch(
            f"expected {ansatz.parameter_count} parameters, got {params.shape}"
        )
    n = ansatz.qubit_count
    ref = ansatz.reference_state or "0" * n
    state = basis_state(ref, n)
    amps = state.amplitudes
    gates = np.empty((n, 2, 2), dtype=np.complex128)
    for layer in range(ansatz.depth + 1):
        if layer > 0:
            amps *= _cz_chain_signs(n)
        base = 2 * n * layer
        cos = np.cos(0.5 * params[base : base + n])
        sin = np.sin(0.5 * params[base : base + n])
        phase = np.exp(0.5j * params[base + n : base + 2 * n])
        gates[:, 0, 0] = phase * cos
        gates[:, 0, 1] = phase * sin
        gates[:, 1, 0] = -np.conj(phase) * sin
        gates[:, 1, 1] = np.conj(phase) * cos
        for q in range(n):
            view = amps.reshape(-1, 2, 2**q)
            amps = np.einsum("ab,hbl->hal", gates[q], view).reshape(-1)
    state.amplitudes = amps
    return state


def _parity(values: np.ndarray) -> np.ndarray:
    v = values.copy()
    for shift in (16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


@lru_cache(maxsize=128)
def _compiled(op: PauliSum):
    """Stacked (permutations, phase vectors, weights) for fast expectations."""
    n = op.qubit_count
    dim = 2**n
    idx = np.arange(dim)
    count = len(op.terms)
    perms = np.empty((count, dim), dtype=np.intp)
    phases = np.empty((count, dim), dtype=np.complex128)
    weights = np.empty(count)
    for row, term in enumerate(op.terms):
        x_mask = 0
        zy_mask = 0
        n_y = 0
        for q, axis in term.axes:
            if axis in ("X", "Y"):
                x_mask |= 1 << q
            if axis in ("Z", "Y"):
                zy_mask |= 1 << q
            if axis == "Y":
                n_y += 1
        signs = 1.0 - 2.0 * _parity(idx & zy_mask)
        perms[row] = idx ^ x_mask
        phases[row] = (1j**n_y) * signs
        weights[row] = term.coefficient.real
    return perms, phases, weights


def expectation(op: PauliSum, state: StateVector) -> float:
    """<psi|O|psi> for a canonical Hermitian sum; exact up to float rounding."""
    if op.qubit_count != state.qubit_count:
        raise DimensionMismatch(
            f"operator on {op.qubit_count} qubits, state on {state.qubit_count}"
        )
    perms, phases, weights = _compiled(op)
    if weights.size == 0:
        return 0.0
    psi = state.amplitudes
    per_term = np.real(np.sum(np.conj(psi[perms]) * phases * psi, axis=1))
    return float(weights @ per_term)


def apply_operator(op: PauliSum, state: StateVector) -> StateVector:
    """O|psi> as a (generally unnormalized) vector; used by oracles and tests."""
    if op.qubit_count != state.qubit_count:
        raise DimensionMismatch("operator/state qubit counts differ")
    psi = state.amplitudes
    out = np.zeros_like(psi)
    perms, phases, weights = _compiled(op)
    for row in range(weights.size):
        out[perms[row]] += weights[row] * phases[row] * psi
    return StateVector(out, state.qubit_count)


def overlap_sq(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2."""
    if a.qubit_count != b.qubit_count:
        raise DimensionMismatch("state qubit counts differ")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def maximally_mixed_expectation(op: PauliSum) -> float:
    """tr(O)/2^n, the expectation in the fully depolarized state."""
    return op.identity_coefficient


def noisy_expectation(op: PauliSum, state: StateVector, noise: NoiseModel) -> float:
    """Expectation after the global depolarizing channel.

    Exactly ``(1-p) <O> + p tr(O)/2^n``; affine in p, which is what makes
    the squared-operator penalty's argmin noise-invariant.
    """
    pure = expectation(op, state)
    return (1.0 - noise.p) * pure + noise.p * maximally_mixed_expectation(op)
