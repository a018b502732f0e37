"""Spin-J operators, the quantum kicked top, and parity-sector reduction.

Basis convention, fixed once for the whole package: basis index ``i`` holds the
``J_z`` eigenstate with ``m = J - i``, so index 0 is the top of the ladder.
``two_j`` stores ``2J`` exactly, which keeps half-integer spins representable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .matops import EigenSystem, check_unitary, eig_hermitian, expm_i_hermitian, max_abs

PARITY_LABELS = ("+", "-")


def _check_two_j(two_j) -> int:
    if int(two_j) != two_j or two_j < 0:
        raise ValueError(f"two_j must be a nonnegative integer, got {two_j!r}")
    return int(two_j)


def jz_values(two_j) -> np.ndarray:
    """``J_z`` eigenvalues ``J, J-1, ..., -J`` in basis-index order."""
    two_j = _check_two_j(two_j)
    return two_j / 2.0 - np.arange(two_j + 1)


def spin_operators(two_j):
    """Matrices ``(jx, jy, jz)`` of the spin-``two_j/2`` irreducible representation.

    ``jz`` is diagonal; ``jx`` and ``jy`` come from the ladder elements
    ``<m+1|J+|m> = sqrt(J(J+1) - m(m+1))``.  Satisfies ``[jx, jy] = i jz``.
    """
    two_j = _check_two_j(two_j)
    dim = two_j + 1
    jmag = two_j / 2.0
    m = jz_values(two_j)
    jz = np.diag(m).astype(complex)
    jplus = np.zeros((dim, dim), dtype=complex)
    src = m[1:]  # states that can still be raised
    jplus[np.arange(dim - 1), np.arange(1, dim)] = np.sqrt(
        jmag * (jmag + 1) - src * (src + 1)
    )
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / 2j
    return jx, jy, jz


@lru_cache(maxsize=4)
def _axis_eigensystem(two_j: int, axis: str) -> EigenSystem:
    """Cached eigendecomposition of ``J_x`` or ``J_y`` (read-only arrays).

    Rotations about a fixed axis are needed repeatedly (Floquet maps at many
    kick strengths, parity operators, sector bases); for large spins the
    eigensolve dominates, so share it.
    """
    jx, jy, _ = spin_operators(two_j)
    system = eig_hermitian({"x": jx, "y": jy}[axis])
    system.values.flags.writeable = False
    system.vectors.flags.writeable = False
    return system


def _axis_rotation(two_j: int, axis: str, angle: float) -> np.ndarray:
    values, vectors = _axis_eigensystem(two_j, axis)
    return (vectors * np.exp(-1j * angle * values)) @ vectors.conj().T


def kicked_top_floquet(two_j, kick: float) -> np.ndarray:
    """One-period propagator of the kicked top: a torsion kick, then a rotation.

    Returns ``exp(-i pi J_y / 2) @ exp(-i kick J_z^2 / (2J))``.  Acting on a
    state, the quadratic ``J_z`` kick is applied first and the quarter-turn
    about ``y`` second.  The torsion factor is diagonal and computed entrywise.
    """
    two_j = _check_two_j(two_j)
    if two_j == 0:
        raise ValueError("two_j = 0 has no torsion term (1/(2J) undefined)")
    if not np.isfinite(kick):
        raise ValueError(f"kick strength must be finite, got {kick!r}")
    m = jz_values(two_j)
    torsion = np.exp(-1j * kick * m**2 / two_j)  # 2J = two_j
    rotation = _axis_rotation(two_j, "y", np.pi / 2)
    return rotation * torsion  # right-multiply by the diagonal kick


def coherent_state(two_j, theta: float, phi: float) -> np.ndarray:
    """Angular momentum coherent state pointing along ``(theta, phi)``.

    The stretched state ``|J, J>`` (basis index 0) is rotated by
    ``exp(-i theta (J_x sin(phi) - J_y cos(phi)))``; the result has unit norm.
    """
    jx, jy, _ = spin_operators(two_j)
    generator = np.sin(phi) * jx - np.cos(phi) * jy
    return expm_i_hermitian(generator, theta)[:, 0].copy()


def parity_operators(two_j):
    """Half-turn rotations ``(exp(-i pi J_y), exp(-i pi J_x))``.

    Both square to ``+I`` for integer ``J`` and to ``-I`` for half-integer
    ``J``; the first commutes with every kicked top of the same spin.
    """
    two_j = _check_two_j(two_j)
    return _axis_rotation(two_j, "y", np.pi), _axis_rotation(two_j, "x", np.pi)


@dataclass(frozen=True)
class SectorTransform:
    """Column-orthonormal isometry onto a simultaneous parity eigenspace.

    ``isometry`` has shape ``(source_dim, sector_dim)`` with ``S^dag S = I``.
    ``parities`` records ``(label, operator, frame)`` triples: the symmetry
    ``operator`` expressed in the frame where it is conserved, together with
    the isometry from the full space into that frame (``None`` for the full
    space itself).  A refinement parity such as ``x`` on the even ``y`` branch
    is only a symmetry after restriction, so its commutator check must run in
    the restricted frame.
    """

    source_dim: int
    sector_dim: int
    isometry: np.ndarray
    parities: tuple

    def project(self, u: np.ndarray) -> np.ndarray:
        """``S^dag u S`` without any symmetry check."""
        s = self.isometry
        return s.conj().T @ u @ s


def _check_parity_label(label, name: str) -> str:
    if label not in PARITY_LABELS:
        raise ValueError(f"{name} must be '+' or '-', got {label!r}")
    return label


def _branch_columns(r: np.ndarray, half_integer: bool, label: str) -> np.ndarray:
    """Eigenvector columns of a parity unitary for one eigenvalue branch.

    Integer spin: eigenvalues are +-1 and ``r`` is Hermitian, so branches are
    sign eigenspaces of ``(r + r^dag)/2``.  Half-integer spin: eigenvalues are
    +-i and ``i r`` is Hermitian; '+' labels the ``+i`` branch.
    """
    if half_integer:
        herm = (1j * r + (1j * r).conj().T) / 2
        w, v = np.linalg.eigh(herm)
        keep = w < 0 if label == "+" else w > 0  # i*r eigenvalue -1 <-> r eigenvalue +i
    else:
        herm = (r + r.conj().T) / 2
        w, v = np.linalg.eigh(herm)
        keep = w > 0 if label == "+" else w < 0
    return v[:, keep]


def _structure_by_jz_squared(columns: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Rotate sector columns onto the ladder basis of ``J_z^2``.

    Parity eigenspaces are massively degenerate, so a numerical eigensolver
    hands back arbitrary mixtures within them; a perturbation that is diagonal
    in the sector index would then sit randomly on the physical ladder.
    ``J_z^2`` restricted to one parity sector is non-degenerate (each ``|m|``
    appears once), so diagonalizing it recovers the paired ``|m>, |-m>``
    combinations uniquely, ordered here by descending ``m^2`` to match the
    top-of-ladder-first convention of the full space.
    """
    restricted = (columns.conj().T * m**2) @ columns
    _, mix = np.linalg.eigh((restricted + restricted.conj().T) / 2)
    return columns @ mix[:, ::-1]


def sector_dimension(two_j, y_parity: str, x_parity: str | None = None) -> int:
    """Dimension of a parity sector, by counting (no matrices built).

    Derived from the traces of the half-turn rotations: ``tr exp(-i pi J_y) =
    tr exp(-i pi J_x) = (-1)^J`` for integer ``J``, 0 for half-integer.
    Cross-checked against the constructed bases in the test suite.
    """
    two_j = _check_two_j(two_j)
    _check_parity_label(y_parity, "y_parity")
    dim = two_j + 1
    if x_parity is None:
        if two_j % 2 == 1:  # half-integer J: branches +-i split evenly
            return dim // 2
        trace_y = 1 if (two_j // 2) % 2 == 0 else -1
        return (dim + trace_y) // 2 if y_parity == "+" else (dim - trace_y) // 2
    _check_parity_label(x_parity, "x_parity")
    if two_j % 4 != 0:
        raise ValueError("x_parity refinement requires an even integer J")
    if y_parity != "+":
        raise ValueError("x_parity refinement is only defined on the even y branch")
    return (dim + 3) // 4 if x_parity == "+" else (dim - 1) // 4


def sector_basis(two_j, y_parity: str, x_parity: str | None = None) -> SectorTransform:
    """Isometry onto a ``y`` parity sector, optionally refined by ``x`` parity.

    The basis is built numerically: diagonalize ``exp(-i pi J_y)``, keep the
    requested branch, then (if asked) diagonalize ``exp(-i pi J_x)`` restricted
    to that branch.  ``x_parity`` is only admissible for even integer ``J`` on
    the even ``y`` branch, where the two parities commute sector-wise.
    """
    two_j = _check_two_j(two_j)
    _check_parity_label(y_parity, "y_parity")
    dim = two_j + 1
    half_integer = two_j % 2 == 1
    r_y, r_x = parity_operators(two_j)
    if x_parity is not None:
        _check_parity_label(x_parity, "x_parity")
        if two_j % 4 != 0:
            raise ValueError(
                f"x_parity refinement requires an even integer J, got 2J = {two_j}"
            )
        if y_parity != "+":
            raise ValueError("x_parity refinement is only defined on the even y branch")

    columns = _branch_columns(r_y, half_integer, y_parity)
    parities = [("y" + y_parity, r_y, None)]
    if x_parity is not None:
        restricted = columns.conj().T @ r_x @ columns
        sub = _branch_columns(restricted, False, x_parity)
        parities.append(("x" + x_parity, restricted, columns))
        columns = columns @ sub
    if columns.shape[1] == 0:
        raise ValueError(
            f"requested sector is empty (source dimension {dim}, "
            f"y_parity {y_parity!r}, x_parity {x_parity!r})"
        )
    columns = _structure_by_jz_squared(columns, jz_values(two_j))
    return SectorTransform(dim, columns.shape[1], columns, tuple(parities))


def restrict_to_sector(
    u: np.ndarray, transform: SectorTransform, commutator_tol: float = 1e-8
) -> np.ndarray:
    """Compress a symmetry-respecting unitary onto a parity sector.

    ``u`` must commute with every parity operator backing ``transform``
    (checked in max-norm); the returned ``S^dag u S`` is then verified to be
    unitary, which certifies that ``u`` really preserved the sector.
    """
    u = check_unitary(u)
    if u.shape[0] != transform.source_dim:
        raise ValueError(
            f"operator dimension {u.shape[0]} does not match "
            f"sector source dimension {transform.source_dim}"
        )
    for label, parity, frame in transform.parities:
        framed = u if frame is None else frame.conj().T @ u @ frame
        defect = max_abs(framed @ parity - parity @ framed)
        if defect > commutator_tol:
            raise ValueError(
                f"operator does not commute with parity {label}: "
                f"max|[U, R]| = {defect:.3e} exceeds {commutator_tol:.1e}; "
                "restriction would not be unitary"
            )
    restricted = transform.project(u)
    return check_unitary(restricted, tol=1e-9)
