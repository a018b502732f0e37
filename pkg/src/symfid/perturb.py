"""Collective qubit rotation generators and the random-matrix decay rate.

The perturbation model is a rotation of every qubit about the same axis by a
common angle ``epsilon``: one factor ``exp(-i epsilon sigma^j / 2)`` per qubit,
i.e. generator ``V = sum_j sigma^j / 2``.  For the z axis ``V`` is diagonal in
the computational basis with entry ``(n_q - 2 popcount(i)) / 2`` at index
``i``.  Mean squared eigenvalue is ``n_q / 4``, so the random-matrix
(Fermi-golden-rule) prediction for the exponential decay rate per kick is
``rate = epsilon^2 * n_q / 4``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensembles import collective_x_basis, pairing_transform, sample_cue
from .matops import check_hermitian, check_unitary, expm_i_hermitian

AXES = ("z", "x")
BASES = ("identity", "pairing", "collective_x", "random", "custom")


@dataclass(frozen=True)
class PerturbationHamiltonian:
    """A Hermitian perturbation generator together with its spectrum.

    ``eigenvalues`` is carried alongside the matrix because the decay-rate
    prediction depends on the spectrum alone and survives any unitary change
    of basis.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        check_hermitian(self.matrix)
        if len(self.eigenvalues) != self.matrix.shape[0]:
            raise ValueError("eigenvalue count does not match generator dimension")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def mean_sq(self) -> float:
        """Mean of the squared eigenvalues."""
        return float(np.mean(self.eigenvalues**2))


def collective_eigenvalues(n_qubits: int) -> np.ndarray:
    """Diagonal of the collective-z generator: ``(n_q - 2 popcount(i)) / 2``."""
    if n_qubits < 1:
        raise ValueError(f"need at least one qubit, got {n_qubits}")
    pop = np.array([int(i).bit_count() for i in range(2**n_qubits)])
    return (n_qubits - 2 * pop) / 2.0


def collective_hamiltonian(n_qubits: int, axis: str = "z") -> PerturbationHamiltonian:
    """Generator of a collective qubit rotation about ``z`` or ``x``.

    The z generator is diagonal; the x generator is its conjugate by the
    balanced-rotation tensor power, which swaps ``sigma_z`` for ``sigma_x``
    in every factor exactly.
    """
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    lam = collective_eigenvalues(n_qubits)
    if axis == "z":
        matrix = np.diag(lam).astype(complex)
    else:
        w = collective_x_basis(n_qubits)
        matrix = (w * lam) @ w  # w @ diag(lam) @ w, with w real symmetric
    return PerturbationHamiltonian(matrix=matrix, eigenvalues=lam)


def require_qubit_dimension(dim: int) -> int:
    """Number of qubits for ``dim``, or a diagnostic if it is not a power of two."""
    n_qubits = int(dim).bit_length() - 1
    if dim <= 0 or 2**n_qubits != dim:
        raise ValueError(
            f"collective qubit perturbations need a power-of-two dimension, got {dim}"
        )
    return n_qubits


def perturbation_unitary(v: PerturbationHamiltonian, epsilon: float) -> np.ndarray:
    """``exp(-i epsilon V)``; computed entrywise when ``V`` is diagonal."""
    if not np.isfinite(epsilon):
        raise ValueError(f"epsilon must be finite, got {epsilon!r}")
    m = v.matrix
    if np.count_nonzero(m - np.diag(np.diagonal(m))) == 0:
        return np.diag(np.exp(-1j * epsilon * np.diagonal(m).real)).astype(complex)
    return expm_i_hermitian(m, epsilon)


def rmt_rate(v: PerturbationHamiltonian, epsilon: float) -> float:
    """Random-matrix exponential decay rate per kick, ``epsilon^2 * mean_sq``."""
    return float(epsilon**2 * v.mean_sq)


def conjugate(v: PerturbationHamiltonian, t: np.ndarray) -> PerturbationHamiltonian:
    """Express the generator in another basis: ``T V T^dag``.

    The spectrum (and with it the predicted decay rate) is unchanged; only the
    locality of the perturbation moves.
    """
    t = check_unitary(t)
    if t.shape[0] != v.dim:
        raise ValueError(
            f"basis transform dimension {t.shape[0]} does not match generator dimension {v.dim}"
        )
    matrix = t @ v.matrix @ t.conj().T
    return PerturbationHamiltonian(matrix=matrix, eigenvalues=v.eigenvalues.copy())


@dataclass(frozen=True)
class PerturbationSpec:
    """Declarative description of a collective perturbation.

    ``basis`` selects the frame the generator is expressed in: ``identity``
    keeps the computational basis, ``pairing`` and ``collective_x`` apply the
    corresponding symmetry transforms, ``random`` conjugates by a seeded Haar
    unitary, ``custom`` by a caller-supplied one.
    """

    n_qubits: int
    epsilon: float
    axis: str = "z"
    basis: str = "identity"
    basis_seed: int | None = None
    basis_matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"need at least one qubit, got {self.n_qubits}")
        if not np.isfinite(self.epsilon):
            raise ValueError(f"epsilon must be finite, got {self.epsilon!r}")
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}, got {self.basis!r}")
        if self.basis == "random" and self.basis_seed is None:
            raise ValueError("basis 'random' requires basis_seed")
        if self.basis == "custom" and self.basis_matrix is None:
            raise ValueError("basis 'custom' requires basis_matrix")


def realize(spec: PerturbationSpec, dim: int):
    """Build ``(generator, kick unitary)`` for a system of dimension ``dim``."""
    n_qubits = require_qubit_dimension(dim)
    if n_qubits != spec.n_qubits:
        raise ValueError(
            f"perturbation n_q = {spec.n_qubits} inconsistent with system "
            f"dimension {dim} (= 2^{n_qubits})"
        )
    v = collective_hamiltonian(spec.n_qubits, spec.axis)
    transform = None
    if spec.basis == "pairing":
        transform = pairing_transform(dim)
    elif spec.basis == "collective_x":
        transform = collective_x_basis(spec.n_qubits)
    elif spec.basis == "random":
        transform = sample_cue(dim, spec.basis_seed)
    elif spec.basis == "custom":
        transform = spec.basis_matrix
    if transform is not None:
        v = conjugate(v, transform)
    return v, perturbation_unitary(v, spec.epsilon)
