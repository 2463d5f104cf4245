"""Finite-dimensional complex state vectors and branch decomposition.

A state is expanded in an observation basis of orthonormal continuer states
plus, when the continuers do not span it, a single unit-norm "dead branch"
holding the residual. By convention the dead-branch coefficient is real and
non-negative; any other phase would do equally well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ORTHO_TOL = 1e-9
DEAD_TOL = 1e-12


class DimensionError(ValueError):
    pass


class OrthonormalityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class StateVector:
    """Dense complex vector. The amplitude array is read-only."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if arr.size < 1:
            raise DimensionError("a state vector needs dimension >= 1")
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __len__(self) -> int:
        return self.amplitudes.size

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)

    def __add__(self, other: StateVector) -> StateVector:
        _check_dims(self, other)
        return StateVector(self.amplitudes + other.amplitudes)

    def __sub__(self, other: StateVector) -> StateVector:
        _check_dims(self, other)
        return StateVector(self.amplitudes - other.amplitudes)

    def __mul__(self, scalar: complex) -> StateVector:
        return StateVector(self.amplitudes * scalar)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = ORTHO_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalized(self) -> StateVector:
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n)

    def allclose(self, other: StateVector, atol: float = 1e-9) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0.0, atol=atol))

    @classmethod
    def basis(cls, dim: int, index: int) -> StateVector:
        e = np.zeros(dim, dtype=np.complex128)
        e[index] = 1.0
        return cls(e)


def as_state(x: StateVector | Sequence[complex] | np.ndarray) -> StateVector:
    return x if isinstance(x, StateVector) else StateVector(x)


def _check_dims(a: StateVector, b: StateVector) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    a, b = as_state(a), as_state(b)
    _check_dims(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def check_orthonormal(states: Sequence[StateVector], tol: float = ORTHO_TOL) -> None:
    """Raise OrthonormalityError naming the worst pair if the Gram matrix is off."""
    if not states:
        return
    mat = np.stack([s.amplitudes for s in states])
    gram = mat.conj() @ mat.T
    dev = np.abs(gram - np.eye(len(states)))
    i, j = np.unravel_index(np.argmax(dev), dev.shape)
    if dev[i, j] > tol:
        raise OrthonormalityError(
            f"continuers {i} and {j} are not orthonormal: <{i}|{j}> = {gram[i, j]:.3g} "
            f"(deviation {dev[i, j]:.3g} > {tol:g})"
        )


@dataclass(frozen=True, eq=False)
class BranchDecomposition:
    coefficients: np.ndarray
    dead_coefficient: complex
    dead_branch: StateVector | None
    basis_states: tuple[StateVector, ...] = field(default=())

    @property
    def n(self) -> int:
        return len(self.basis_states)

    def reconstruct(self) -> StateVector:
        dim = self.basis_states[0].dim if self.basis_states else self.dead_branch.dim
        out = np.zeros(dim, dtype=np.complex128)
        for a, s in zip(self.coefficients, self.basis_states):
            out += a * s.amplitudes
        if self.dead_branch is not None:
            out += self.dead_coefficient * self.dead_branch.amplitudes
        return StateVector(out)

    def all_coefficients(self) -> np.ndarray:
        """Continuer coefficients, with the dead coefficient appended if present."""
        if self.dead_branch is None:
            return np.asarray(self.coefficients)
        return np.append(self.coefficients, self.dead_coefficient)


def decompose(
    psi: StateVector,
    continuers: Sequence[StateVector],
    ortho_tol: float = ORTHO_TOL,
    dead_tol: float = DEAD_TOL,
) -> BranchDecomposition:
    psi = as_state(psi)
    continuers = tuple(as_state(c) for c in continuers)
    for c in continuers:
        _check_dims(psi, c)
    check_orthonormal(continuers, ortho_tol)

    if continuers:
        mat = np.stack([c.amplitudes for c in continuers])
        coeffs = mat.conj() @ psi.amplitudes
        residual = psi.amplitudes - coeffs @ mat
    else:
        coeffs = np.zeros(0, dtype=np.complex128)
        residual = psi.amplitudes.copy()
    r = float(np.linalg.norm(residual))
    if r > dead_tol:
        return BranchDecomposition(coeffs, complex(r), StateVector(residual / r), continuers)
    return BranchDecomposition(coeffs, 0j, None, continuers)


def random_completion(
    partial_basis: Sequence[StateVector],
    dimension: int,
    seed: int,
    ortho_tol: float = ORTHO_TOL,
) -> list[StateVector]:
    """Extend an orthonormal set to a full basis from seeded random vectors (Gram-Schmidt via QR)."""
    partial = [as_state(s) for s in partial_basis]
    if len(partial) > dimension:
        raise DimensionError(f"{len(partial)} vectors cannot fit in dimension {dimension}")
    for s in partial:
        if s.dim != dimension:
            raise DimensionError(f"dimension mismatch: {s.dim} vs {dimension}")
    try:
        check_orthonormal(partial, ortho_tol)
    except OrthonormalityError as exc:
        raise OrthonormalityError(f"partial basis is linearly dependent or not orthonormal: {exc}") from None

    rng = np.random.default_rng(seed)
    missing = dimension - len(partial)
    if missing == 0:
        return partial
    g = rng.standard_normal((dimension, missing)) + 1j * rng.standard_normal((dimension, missing))
    if partial:
        p = np.stack([s.amplitudes for s in partial], axis=1)
        # project twice so the new columns are orthogonal to ~1e-15
        for _ in range(2):
            g = g - p @ (p.conj().T @ g)
    q, r = np.linalg.qr(g)
    if np.min(np.abs(np.diag(r))) < 1e-8:
        raise OrthonormalityError("random completion degenerated; try another seed")
    return partial + [StateVector(q[:, i]) for i in range(missing)]
