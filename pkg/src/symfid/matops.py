"""Dense complex operator core: algebra checks, eigensystems, unitary exponentials.

Everything downstream (spin operators, Floquet maps, random ensembles, echo
evolution, LDOS) runs through these few routines, so the conventions are fixed
here once:

* eigenvalues of Hermitian matrices are returned ascending;
* eigenangles of unitary matrices use ``U v = exp(-i phi) v`` and live on the
  branch ``(-pi, pi]``, sorted ascending;
* ``exp(-i s H)`` is computed by eigendecomposition of ``H``, which keeps the
  result unitary to eigensolver accuracy.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.linalg import schur

#: Largest tolerated max-norm of ``H - H^dag`` for Hermitian inputs.
HERMITIAN_TOL = 1e-12
#: Largest tolerated max-norm of ``U^dag U - I`` for unitary inputs.
UNITARY_TOL = 1e-10


def max_abs(a) -> float:
    """Max-norm (largest entry magnitude) of an array."""
    a = np.asarray(a)
    return 0.0 if a.size == 0 else float(np.abs(a).max())


def hermiticity_defect(h) -> float:
    """Max-norm of ``H - H^dag``."""
    h = np.asarray(h)
    return max_abs(h - h.conj().T)


def unitarity_defect(u) -> float:
    """Max-norm of ``U^dag U - I``."""
    u = np.asarray(u)
    return max_abs(u.conj().T @ u - np.eye(u.shape[0]))


def _as_square(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def check_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate and return ``h`` as a complex ndarray, or raise ``ValueError``."""
    h = _as_square(h, "Hermitian matrix")
    defect = hermiticity_defect(h)
    if defect > tol:
        raise ValueError(
            f"matrix is not Hermitian: max|H - H^dag| = {defect:.3e} exceeds {tol:.1e}"
        )
    return h


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    """Validate and return ``u`` as a complex ndarray, or raise ``ValueError``."""
    u = _as_square(u, "unitary matrix")
    defect = unitarity_defect(u)
    if defect > tol:
        raise ValueError(
            f"matrix is not unitary: max|U^dag U - I| = {defect:.3e} exceeds {tol:.1e}"
        )
    return u


class EigenSystem(NamedTuple):
    """Eigendecomposition with orthonormal eigenvector columns.

    ``values`` holds real eigenvalues for Hermitian input, or eigenangles in
    ``(-pi, pi]`` for unitary input; ``vectors[:, k]`` is the eigenvector for
    ``values[k]``.
    """

    values: np.ndarray
    vectors: np.ndarray


def eig_hermitian(h, tol: float = HERMITIAN_TOL) -> EigenSystem:
    """Eigendecompose a Hermitian matrix; eigenvalues ascending."""
    h = check_hermitian(h, tol)
    values, vectors = np.linalg.eigh(h)
    return EigenSystem(values, vectors)


def eig_unitary(u, tol: float = UNITARY_TOL) -> EigenSystem:
    """Eigendecompose a unitary matrix into eigenangles and orthonormal vectors.

    Angles ``phi`` satisfy ``U v = exp(-i phi) v``, wrapped to ``(-pi, pi]``
    (a tie at ``-pi`` resolves to ``+pi``) and sorted ascending.  The complex
    Schur form is used so that eigenvectors stay orthonormal even inside
    degenerate clusters.
    """
    u = check_unitary(u, tol)
    t, z = schur(u, output="complex")
    phi = -np.angle(np.diagonal(t))
    phi = np.where(phi == -np.pi, np.pi, phi)
    order = np.argsort(phi, kind="stable")
    return EigenSystem(np.ascontiguousarray(phi[order]), np.ascontiguousarray(z[:, order]))


def expm_i_hermitian(h, s: float, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """``exp(-i * s * H)`` for Hermitian ``H``, via eigendecomposition.

    Unitarity of the result is limited only by eigensolver accuracy, unlike
    series or scaling-and-squaring schemes.
    """
    values, vectors = eig_hermitian(h, tol)
    return (vectors * np.exp(-1j * s * values)) @ vectors.conj().T
