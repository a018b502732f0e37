"""Echo evolution: how fast a perturbed twin of a quantum map loses overlap.

The figure of merit at kick count ``t`` is ``F(t) = |<a_t|b_t>|^2`` where both
tracks start from the same state, ``a`` evolves under the map ``U`` and ``b``
under the perturbed map ``U exp(-i epsilon V)``.  Evolution is by repeated
matrix-vector products (never powers of ``U``), and a whole batch of initial
states advances per step as one matrix product.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .seeds import operator_seed, state_seed

#: States per evolution batch.  Fixed so that the batch partition (and with it
#: every floating-point reduction) depends only on the trial counts, never on
#: worker scheduling.
BATCH_STATES = 64


@dataclass(frozen=True)
class FidelityCurve:
    """``F(t)`` at integer kick counts ``0..T``, optionally trial-averaged."""

    steps: np.ndarray
    values: np.ndarray
    trial_count: int = 1
    stderr: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.steps)

    def time_to_reach(self, level: float) -> int | None:
        """First kick count with ``F(t) <= level``, or None if never reached."""
        below = np.nonzero(self.values <= level)[0]
        return int(self.steps[below[0]]) if below.size else None


def haar_state(dim: int, seed: int) -> np.ndarray:
    """Normalized vector of i.i.d. standard complex Gaussian amplitudes."""
    if dim < 1:
        raise ValueError(f"state dimension must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _echo_block(u: np.ndarray, kick: np.ndarray, states: np.ndarray, steps: int) -> np.ndarray:
    """Per-state fidelity rows for a batch of initial states (columns).

    ``F(0) = 1`` is exact by definition (identical normalized tracks); later
    values come from the running overlap of the two tracks.
    """
    perturbed_map = u @ kick
    a = states.astype(complex, copy=True)
    b = states.astype(complex, copy=True)
    out = np.empty((states.shape[1], steps + 1))
    out[:, 0] = 1.0
    for t in range(1, steps + 1):
        a = u @ a
        b = perturbed_map @ b
        out[:, t] = np.abs(np.einsum("ij,ij->j", a.conj(), b)) ** 2
    return out


def fidelity_curve(u: np.ndarray, kick: np.ndarray, psi: np.ndarray, steps: int) -> FidelityCurve:
    """Echo curve of one initial state under ``u`` versus ``u @ kick``."""
    if steps < 0:
        raise ValueError(f"step count must be >= 0, got {steps}")
    psi = np.asarray(psi)
    if u.shape[0] != kick.shape[0] or u.shape[0] != psi.shape[0]:
        raise ValueError(
            f"dimension mismatch: map {u.shape[0]}, kick {kick.shape[0]}, state {psi.shape[0]}"
        )
    values = _echo_block(u, kick, psi.reshape(-1, 1), steps)[0]
    return FidelityCurve(steps=np.arange(steps + 1), values=values)


def averaged_fidelity(
    system,
    kick: np.ndarray,
    n_states: int,
    n_operators: int,
    master_seed: int,
    steps: int,
    threads: int = 1,
) -> FidelityCurve:
    """Mean echo curve over random initial states (and, optionally, operators).

    ``system`` is either a fixed unitary or, for ensemble-sourced runs, a
    callable mapping a derived operator seed to a unitary; ``n_operators > 1``
    requires the callable form.  Trials are enumerated deterministically from
    ``master_seed`` in ``(operator, state)`` order and reduced in that order,
    so the result is bit-identical for any ``threads``.
    """
    if n_states < 1 or n_operators < 1:
        raise ValueError("need at least one state and one operator per run")
    fixed = not callable(system)
    if fixed and n_operators != 1:
        raise ValueError("n_operators > 1 requires an ensemble-sourced (callable) system")

    tasks = []
    for op_index in range(n_operators):
        for lo in range(0, n_states, BATCH_STATES):
            tasks.append((op_index, lo, min(lo + BATCH_STATES, n_states)))

    def run_task(task):
        op_index, lo, hi = task
        try:
            u = system if fixed else system(operator_seed(master_seed, op_index))
            dim = u.shape[0]
            if kick.shape[0] != dim:
                raise ValueError(
                    f"kick dimension {kick.shape[0]} does not match system dimension {dim}"
                )
            states = np.column_stack(
                [haar_state(dim, state_seed(master_seed, op_index, s)) for s in range(lo, hi)]
            )
            return _echo_block(u, kick, states, steps)
        except Exception as exc:
            raise RuntimeError(
                f"trial batch failed at operator {op_index}, states {lo}..{hi - 1} "
                f"({type(exc).__name__}: {exc})"
            ) from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run_task, tasks))
    else:
        blocks = [run_task(t) for t in tasks]

    per_trial = np.vstack(blocks)  # (n_operators * n_states, steps + 1), trial order
    mean = per_trial.mean(axis=0)
    n_trials = per_trial.shape[0]
    if n_trials > 1:
        stderr = per_trial.std(axis=0, ddof=1) / np.sqrt(n_trials)
    else:
        stderr = np.zeros(steps + 1)
    return FidelityCurve(
        steps=np.arange(steps + 1), values=mean, trial_count=n_trials, stderr=stderr
    )
