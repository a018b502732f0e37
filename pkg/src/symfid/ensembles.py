"""Random unitary ensembles and the symmetry-building basis transforms.

CUE matrices are sampled by the Hurwitz composition: a product of elementary
two-level rotations ``E(i, i+1; phi, psi, chi)`` whose mixing angles ``phi``
carry the densities that make the product Haar distributed.  The interpolating
family reuses the identical draws and simply scales every mixing angle by
``delta``, which connects Haar (``delta = 1``) to a diagonal matrix of i.i.d.
uniform phases (``delta = 0``) while the spectral statistics move from the
beta = 2 Wigner surmise to Poisson.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf
from scipy.stats import kstest

from .matops import check_unitary, max_abs


def two_level_rotation(phi: float, psi: float, chi: float) -> np.ndarray:
    """Elementary 2x2 unitary ``[[cos(phi) e^{i psi}, sin(phi) e^{i chi}],
    [-sin(phi) e^{-i chi}, cos(phi) e^{-i psi}]]``."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array(
        [
            [c * np.exp(1j * psi), s * np.exp(1j * chi)],
            [-s * np.exp(-1j * chi), c * np.exp(-1j * psi)],
        ]
    )


def sample_interpolating(n: int, delta: float, seed: int) -> np.ndarray:
    """One draw from the interpolating unitary ensemble.

    Builds ``e^{i alpha} E_1 E_2 ... E_{n-1}`` where composite rotation ``E_r``
    is a chain of elementary two-level rotations on the adjacent index pairs
    ``(n-1-r, n-r), ..., (n-2, n-1)``.  Within a chain the mixing angle of the
    factor ``s`` steps from the right end is ``arcsin(xi^(1/(2(s+1))))`` with
    ``xi`` uniform, the phase angles are uniform on ``[0, 2 pi)``, and only
    the rightmost factor carries a ``chi`` phase.  Those densities make
    ``delta = 1`` exactly Haar; ``delta`` scales every mixing angle (the
    phase draws are untouched, so the same seed yields entrywise-continuous
    samples in ``delta``).
    """
    if n < 2:
        raise ValueError(f"ensemble dimension must be >= 2, got {n}")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    rng = np.random.default_rng(seed)
    # accumulate the transpose: right-multiplying U by a two-level rotation is
    # a 2x2 action on two adjacent rows of U^T, which are contiguous
    ut = np.eye(n, dtype=complex)
    ut *= np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    for r in range(1, n):
        s_index = np.arange(r - 1, -1, -1)  # chain factors left to right
        phis = delta * np.arcsin(rng.random(r) ** (1.0 / (2.0 * (s_index + 1))))
        psis = rng.uniform(0.0, 2.0 * np.pi, r)
        chi = rng.uniform(0.0, 2.0 * np.pi)
        for idx in range(r):
            block = two_level_rotation(phis[idx], psis[idx], chi if idx == r - 1 else 0.0)
            i = n - 1 - r + idx
            ut[i : i + 2] = block.T @ ut[i : i + 2]
    return ut.T.copy()


def sample_cue(n: int, seed: int) -> np.ndarray:
    """One Haar-distributed (CUE) unitary; the ``delta = 1`` interpolating draw."""
    return sample_interpolating(n, 1.0, seed)


def block_diagonal(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``diag(a, b)`` for two equal-dimension unitary blocks."""
    a = check_unitary(a)
    b = check_unitary(b)
    if a.shape != b.shape:
        raise ValueError(f"blocks must have equal dimension, got {a.shape} and {b.shape}")
    n = a.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, :n] = a
    out[n:, n:] = b
    return out


def index_complement_operator(n: int) -> np.ndarray:
    """Permutation ``|i> -> |n-1-i>`` (bitwise complement when ``n`` is 2^k)."""
    return np.eye(n)[::-1].copy()


def pairing_transform(n: int) -> np.ndarray:
    """Real orthogonal map pairing each index with its complement.

    Column ``i`` is ``(|i> + |n-1-i>)/sqrt(2)`` for ``i < n/2`` and
    ``(|n-1-i> - |i>)/sqrt(2)`` otherwise.  Conjugating any block-diagonal
    operator ``diag(A, B)`` by it yields an operator that commutes with the
    index-complement permutation, manufacturing an exact symmetry that the
    collective-z rotation breaks.
    """
    if n % 2 != 0:
        raise ValueError(f"pairing transform needs an even dimension, got {n}")
    p = np.zeros((n, n))
    half = n // 2
    rt = 1.0 / np.sqrt(2.0)
    for i in range(half):
        p[i, i] = rt
        p[n - 1 - i, i] = rt
    for i in range(half, n):
        p[n - 1 - i, i] = rt
        p[i, i] = -rt
    return p


def collective_x_basis(n_qubits: int) -> np.ndarray:
    """Tensor power of the balanced 2x2 rotation ``[[1, 1], [1, -1]]/sqrt(2)``.

    Real symmetric and involutive; conjugating the collective-z generator by
    it produces the collective-x generator exactly.
    """
    if n_qubits < 1:
        raise ValueError(f"need at least one qubit, got {n_qubits}")
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    out = h
    for _ in range(n_qubits - 1):
        out = np.kron(out, h)
    return out


def wigner_surmise_pdf(s):
    """beta = 2 Wigner surmise density ``(32/pi^2) s^2 exp(-4 s^2 / pi)``."""
    s = np.asarray(s, dtype=float)
    return 32.0 / np.pi**2 * s**2 * np.exp(-4.0 * s**2 / np.pi)


def wigner_surmise_cdf(s):
    s = np.asarray(s, dtype=float)
    return erf(2.0 * s / np.sqrt(np.pi)) - 4.0 * s / np.pi * np.exp(-4.0 * s**2 / np.pi)


def poisson_spacing_pdf(s):
    """Poisson nearest-neighbor density ``exp(-s)``."""
    return np.exp(-np.asarray(s, dtype=float))


def poisson_spacing_cdf(s):
    return 1.0 - np.exp(-np.asarray(s, dtype=float))


@dataclass(frozen=True)
class SpacingHistogram:
    """Pooled, unfolded nearest-neighbor eigenangle spacings of a sample set."""

    bin_edges: np.ndarray
    densities: np.ndarray
    sample_count: int
    spacings: np.ndarray
    ks_poisson: tuple  # (statistic, p-value)
    ks_wigner: tuple

    @property
    def bin_centers(self) -> np.ndarray:
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2


def eigenangle_spacings(u: np.ndarray) -> np.ndarray:
    """Circular nearest-neighbor spacings, unfolded to unit mean.

    Eigenangles of a unitary are uniformly dense on the circle, so unfolding
    is exact division by the mean spacing ``2 pi / n``.
    """
    u = check_unitary(u)
    n = u.shape[0]
    if n < 2:
        raise ValueError("need at least two eigenangles for spacings")
    angles = np.sort(np.angle(np.linalg.eigvals(u)))
    gaps = np.empty(n)
    gaps[:-1] = np.diff(angles)
    gaps[-1] = 2.0 * np.pi - (angles[-1] - angles[0])
    return gaps / (2.0 * np.pi / n)


def spacing_distribution(samples, n_bins: int = 60) -> SpacingHistogram:
    """Pool unfolded spacings of same-dimension unitaries into a histogram.

    Densities integrate to one; the result carries Kolmogorov-Smirnov
    statistics against the Poisson and beta = 2 Wigner surmise references.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("no samples given")
    dims = {np.asarray(s).shape for s in samples}
    if len(dims) != 1:
        raise ValueError(f"all samples must share one dimension, got {sorted(dims)}")
    pooled = np.concatenate([eigenangle_spacings(u) for u in samples])
    edges = np.linspace(0.0, max(pooled.max(), 1.0), n_bins + 1)
    densities, _ = np.histogram(pooled, bins=edges, density=True)
    return SpacingHistogram(
        bin_edges=edges,
        densities=densities,
        sample_count=len(samples),
        spacings=pooled,
        ks_poisson=tuple(kstest(pooled, poisson_spacing_cdf)[:2]),
        ks_wigner=tuple(kstest(pooled, wigner_surmise_cdf)[:2]),
    )


def commutes_with_complement(m: np.ndarray, tol: float = 1e-10) -> bool:
    """True when ``m`` commutes with the index-complement permutation."""
    c = index_complement_operator(m.shape[0])
    return max_abs(m @ c - c @ m) <= tol
