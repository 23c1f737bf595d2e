"""Exact algebra over weighted Pauli strings.

Operators are stored as canonical sums of Pauli strings: per term a real
coefficient and a sparse mapping from qubit index to one of ``X``, ``Y``,
``Z`` (absent index = identity on that qubit).  Canonicalization merges
like terms, drops coefficients below a tolerance, sorts terms
lexicographically by their axes, and checks that residual imaginary parts
(from phase cancellation during products) stay below tolerance, so every
exposed :class:`PauliSum` is Hermitian and deterministic to serialize.

Complex phases appear only transiently: single-term products such as
``X0 * Y0 = i Z0`` carry their phase in the returned term, and sums with
non-cancelling phases are rejected at canonicalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DimensionMismatch, HermiticityError

DROP_TOLERANCE = 1e-12

Axes = tuple[tuple[int, str], ...]

# Single-qubit products A*B -> (phase, result axis); None means identity.
_PRODUCTS: dict[tuple[str, str], tuple[complex, str | None]] = {
    ("X", "X"): (1.0, None),
    ("Y", "Y"): (1.0, None),
    ("Z", "Z"): (1.0, None),
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}


def _normalize_axes(axes) -> Axes:
    if isinstance(axes, Mapping):
        pairs = list(axes.items())
    else:
        pairs = [(int(q), a) for q, a in axes]
    pairs.sort()
    for q, a in pairs:
        if q < 0:
            raise ValueError(f"negative qubit index {q}")
        if a not in ("X", "Y", "Z"):
            raise ValueError(f"unknown Pauli axis {a!r}")
    qubits = [q for q, _ in pairs]
    if len(set(qubits)) != len(qubits):
        raise ValueError("duplicate qubit index in Pauli term")
    return tuple(pairs)


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string.

    ``axes`` maps qubit index to axis letter, kept as a sorted tuple of
    ``(qubit, axis)`` pairs; an empty tuple is the identity term.  The
    coefficient may be complex on intermediate products; sums expose only
    real coefficients.
    """

    coefficient: complex
    axes: Axes = ()

    def __post_init__(self):
        object.__setattr__(self, "axes", _normalize_axes(self.axes))
        c = complex(self.coefficient)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise ValueError("non-finite coefficient")
        object.__setattr__(self, "coefficient", c)

    @property
    def is_identity(self) -> bool:
        return not self.axes

    def max_qubit(self) -> int:
        return self.axes[-1][0] if self.axes else -1

    def __repr__(self) -> str:
        label = " ".join(f"{a}{q}" for q, a in self.axes) or "I"
        c = self.coefficient
        shown = f"{c.real:+g}" if c.imag == 0 else f"{c:+g}"
        return f"PauliTerm({shown}, {label})"


def multiply_terms(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Product of two Pauli terms with the accumulated phase in the coefficient."""
    phase = a.coefficient * b.coefficient
    axes_b = dict(b.axes)
    out: list[tuple[int, str]] = []
    for q, ax in a.axes:
        other = axes_b.pop(q, None)
        if other is None:
            out.append((q, ax))
            continue
        p, res = _PRODUCTS[(ax, other)]
        phase *= p
        if res is not None:
            out.append((q, res))
    out.extend(axes_b.items())
    return PauliTerm(phase, out)


def _merge(terms: Iterable[PauliTerm]) -> dict[Axes, complex]:
    acc: dict[Axes, complex] = {}
    for t in terms:
        acc[t.axes] = acc.get(t.axes, 0.0) + t.coefficient
    return acc


@dataclass(frozen=True)
class PauliSum:
    """Canonical Hermitian sum of Pauli strings on ``qubit_count`` qubits.

    Construction canonicalizes: like terms are merged, coefficients with
    magnitude below ``drop_tol`` are removed, terms are sorted by axes, and
    a residual imaginary part above ``drop_tol`` raises
    :class:`~cvqe.errors.HermiticityError`.  Instances are immutable and
    hashable, so they can be shared freely and used as cache keys.
    """

    terms: tuple[PauliTerm, ...]
    qubit_count: int
    drop_tol: float = field(default=DROP_TOLERANCE, compare=False, repr=False)

    def __post_init__(self):
        n = int(self.qubit_count)
        if n < 1:
            raise ValueError("qubit_count must be positive")
        merged = _merge(self.terms)
        canon = []
        for axes in sorted(merged):
            c = merged[axes]
            if abs(c) < self.drop_tol:
                continue
            if abs(c.imag) > self.drop_tol:
                raise HermiticityError(
                    f"residual imaginary coefficient {c.imag:g} on term {axes}"
                )
            if axes and axes[-1][0] >= n:
                raise ValueError(
                    f"term acts on qubit {axes[-1][0]} but qubit_count is {n}"
                )
            canon.append(PauliTerm(c.real, axes))
        object.__setattr__(self, "terms", tuple(canon))
        object.__setattr__(self, "qubit_count", n)

    @property
    def identity_coefficient(self) -> float:
        for t in self.terms:
            if t.is_identity:
                return t.coefficient.real
        return 0.0

    def non_identity_term_count(self) -> int:
        return sum(1 for t in self.terms if not t.is_identity)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check_dim(other)
        return PauliSum(self.terms + other.terms, self.qubit_count)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        self._check_dim(other)
        negated = tuple(PauliTerm(-t.coefficient, t.axes) for t in other.terms)
        return PauliSum(self.terms + negated, self.qubit_count)

    def __mul__(self, scalar: float) -> "PauliSum":
        s = float(scalar)
        return PauliSum(
            tuple(PauliTerm(s * t.coefficient, t.axes) for t in self.terms),
            self.qubit_count,
        )

    __rmul__ = __mul__

    def _check_dim(self, other: "PauliSum"):
        if self.qubit_count != other.qubit_count:
            raise DimensionMismatch(
                f"qubit counts differ: {self.qubit_count} vs {other.qubit_count}"
            )

    def __repr__(self) -> str:
        body = " + ".join(repr(t) for t in self.terms) or "0"
        return f"PauliSum(n={self.qubit_count}, {body})"


def identity_sum(qubit_count: int, coefficient: float = 1.0) -> PauliSum:
    return PauliSum((PauliTerm(coefficient),), qubit_count)


def _raw_product(a: PauliSum, b: PauliSum) -> dict[Axes, complex]:
    """Term-wise product A*B without canonicalization (phases kept)."""
    acc: dict[Axes, complex] = {}
    for ta in a.terms:
        for tb in b.terms:
            t = multiply_terms(ta, tb)
            acc[t.axes] = acc.get(t.axes, 0.0) + t.coefficient
    return acc


def square_shifted(observable: PauliSum, shift: float) -> PauliSum:
    """The Hermitian operator ``(C - shift*I)**2`` as a canonical sum.

    All imaginary contributions from cross terms must cancel; a residual
    above the drop tolerance raises :class:`HermiticityError` (it signals a
    non-Hermitian input).
    """
    shifted = observable - identity_sum(observable.qubit_count, float(shift))
    raw = _raw_product(shifted, shifted)
    terms = tuple(PauliTerm(c, axes) for axes, c in raw.items())
    return PauliSum(terms, observable.qubit_count)


def commutes(a: PauliSum, b: PauliSum, tol: float = 1e-10) -> bool:
    """True iff every coefficient of ``AB - BA`` has magnitude <= tol."""
    a._check_dim(b)
    ab = _raw_product(a, b)
    ba = _raw_product(b, a)
    for axes in set(ab) | set(ba):
        if abs(ab.get(axes, 0.0) - ba.get(axes, 0.0)) > tol:
            return False
    return True


def coefficient_norm(op: PauliSum) -> float:
    """Sum of absolute coefficients (identity included); bounds the spectral norm."""
    return float(sum(abs(t.coefficient) for t in op.terms))


def trace(op: PauliSum) -> float:
    """Exact trace: only the identity term survives, weighted by 2**n."""
    return float(2**op.qubit_count) * op.identity_coefficient
