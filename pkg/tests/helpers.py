"""Shared oracles and generators for the test suite.

Everything here is deliberately independent of the library's own fast
paths: dense matrices are built with plain numpy kron chains, hulls are
checked by dominance properties, and simplex minima come from composition
enumeration plus pairwise-transfer refinement.
"""

import numpy as np

from cvqe import (
    PauliSum,
    PauliTerm,
    build_number_operator,
    build_s_squared,
    build_total_sz,
    build_z_parity,
)

_I = np.eye(2, dtype=complex)
_MATS = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_oracle(op: PauliSum) -> np.ndarray:
    """Independent dense matrix: explicit kron chain per term."""
    n = op.qubit_count
    out = np.zeros((2**n, 2**n), dtype=complex)
    for term in op.terms:
        axes = dict(term.axes)
        mat = np.array([[1.0]], dtype=complex)
        for q in range(n - 1, -1, -1):
            mat = np.kron(mat, _MATS.get(axes.get(q), _I))
        out += term.coefficient * mat
    return out


def random_pauli_sum(rng: np.random.Generator, n: int, n_terms: int = 6) -> PauliSum:
    terms = []
    for _ in range(n_terms):
        support = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
        axes = [(int(q), str(rng.choice(["X", "Y", "Z"]))) for q in support]
        terms.append(PauliTerm(float(rng.normal()), axes))
    return PauliSum(tuple(terms), n)


def random_state(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


def heisenberg_pair(n: int, i: int, j: int, coupling: float) -> list[PauliTerm]:
    return [PauliTerm(coupling / 4.0, ((i, a), (j, a))) for a in ("X", "Y", "Z")]


def random_symmetric_hamiltonian(rng: np.random.Generator, n: int) -> PauliSum:
    """Random all-to-all Heisenberg couplings plus field and spin-squared terms.

    Commutes with total Sz, total S^2, and the number operator for any
    draw, which makes it a generator of commuting (H, C) instances.
    """
    terms: list[PauliTerm] = []
    for i in range(n):
        for j in range(i + 1, n):
            terms.extend(heisenberg_pair(n, i, j, float(rng.normal(scale=1.5))))
    field = float(rng.normal())
    terms.extend(PauliTerm(field / 2.0, ((q, "Z"),)) for q in range(n))
    spin2 = float(rng.normal(scale=0.5))
    terms.extend(
        PauliTerm(spin2 * t.coefficient.real, t.axes) for t in build_s_squared(n).terms
    )
    return PauliSum(tuple(terms), n)


def observable_menu(n: int):
    return [
        ("sz", build_total_sz(n), 0.5),
        ("number", build_number_operator(n), 1.0),
        ("s2", build_s_squared(n), 0.75),
        ("zparity", build_z_parity(n), 2.0),
    ]


def brute_force_mixture_min(points, objective, steps: int = 10, refine_rounds: int = 200):
    """Minimize a convex ``objective(weights)`` over the probability simplex.

    Enumerates all integer compositions of ``steps`` over the points for a
    coarse start, then refines by pairwise mass transfers with shrinking
    step; convexity makes the local refinement globally convergent.
    """
    m = len(points)

    def compositions(total, slots):
        if slots == 1:
            yield (total,)
            return
        for head in range(total + 1):
            for rest in compositions(total - head, slots - 1):
                yield (head, *rest)

    best_w = None
    best_val = np.inf
    for comp in compositions(steps, m):
        w = np.array(comp, dtype=float) / steps
        val = objective(w)
        if val < best_val:
            best_val, best_w = val, w
    w = best_w.copy()
    step = 1.0 / steps
    for _ in range(refine_rounds):
        improved = False
        for i in range(m):
            if w[i] < step:
                continue
            for j in range(m):
                if i == j:
                    continue
                trial = w.copy()
                trial[i] -= step
                trial[j] += step
                val = objective(trial)
                if val < best_val - 1e-18:
                    best_val, w = val, trial
                    improved = True
        if not improved:
            step *= 0.5
            if step < 1e-12:
                break
    return best_val, w
