"""Declarative experiment runner: config parsing, sweeps, CSV and manifest output.

A run is described by a flat INI-style config (sections ``[experiment]``,
``[system]``, ``[sector]``, ``[perturbation]``, ``[trials]``, ``[analysis]``).
The keys ``k``, ``delta``, ``block_delta`` and ``epsilon`` accept
comma-separated sweep lists; each sweep combination writes its own CSV files.
Outputs are bit-reproducible: all randomness derives from ``master_seed`` via
the documented seed mixer, reductions run in fixed trial order, and floats are
serialized with 17 significant digits.  The manifest written next to the CSVs
mirrors the fully resolved config and is itself re-runnable as a config file.
"""

from __future__ import annotations

import configparser
import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import echo, spectra
from .ensembles import block_diagonal, sample_interpolating, spacing_distribution
from .perturb import PerturbationSpec, realize, rmt_rate
from .seeds import SEED_FN_ID, mix64, operator_seed
from .spin import kicked_top_floquet, restrict_to_sector, sector_basis, sector_dimension

ARTIFACT_VERSION = "0.1.0"

EXPERIMENTS = ("fidelity", "ldos", "ensemble_stats", "sector_info")
SYSTEM_KINDS = ("qkt", "qkt_sector", "interpolating", "interpolating_blocks")

#: Sections a manifest adds on top of a config; ignored when re-parsed.
_MANIFEST_SECTIONS = ("meta", "outputs", "notes")


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved experiment description (defaults already applied)."""

    experiment: str
    output_dir: str
    system_kind: str
    two_j: int | None = None
    k_values: tuple | None = None
    n: int | None = None
    delta_values: tuple | None = None
    block_dim: int | None = None
    block_delta_values: tuple | None = None
    y_parity: str | None = None
    x_parity: str | None = None
    n_qubits: int | None = None
    epsilon_values: tuple | None = None
    axis: str = "z"
    basis: str = "identity"
    basis_seed: int | None = None
    basis_file: str | None = None
    n_states: int = 1
    n_operators: int = 1
    master_seed: int = 0
    steps: int = 0
    f_floor: float = 0.01
    n_bins: int = spectra.DEFAULT_LDOS_BINS
    curvature_threshold: float = spectra.CURVATURE_RATIO_THRESHOLD
    with_ldos: bool = False

    @property
    def system_dim(self) -> int:
        if self.system_kind == "qkt":
            return self.two_j + 1
        if self.system_kind == "qkt_sector":
            return sector_dimension(self.two_j, self.y_parity, self.x_parity)
        if self.system_kind == "interpolating":
            return self.n
        return 2 * self.block_dim

    @property
    def sweep_key(self) -> str:
        return {
            "qkt": "k",
            "qkt_sector": "k",
            "interpolating": "delta",
            "interpolating_blocks": "block_delta",
        }[self.system_kind]

    @property
    def sweep_values(self) -> tuple:
        return {
            "k": self.k_values,
            "delta": self.delta_values,
            "block_delta": self.block_delta_values,
        }[self.sweep_key]


@dataclass(frozen=True)
class RunManifest:
    """Record of one completed run: resolved config, outputs, and digests."""

    path: Path
    config: ExperimentConfig
    outputs: dict
    notes: dict
    duration_seconds: float
    version: str = ARTIFACT_VERSION
    seed_fn: str = SEED_FN_ID


# ---------------------------------------------------------------------------
# config parsing


class _Reader:
    """configparser wrapper that tracks consumed keys and reports key paths."""

    def __init__(self, text: str):
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ValueError(f"config is not valid INI text: {exc}") from exc
        self.parser = parser
        self.consumed = set()

    def get(self, section: str, key: str, convert, default=...):
        self.consumed.add((section, key))
        if not self.parser.has_option(section, key):
            if default is ...:
                raise ValueError(f"[{section}] {key}: missing required key")
            return default
        raw = self.parser.get(section, key).strip()
        try:
            return convert(raw)
        except ValueError as exc:
            raise ValueError(f"[{section}] {key}: {exc}") from exc

    def reject_unconsumed(self, allowed_sections):
        for section in self.parser.sections():
            if section in _MANIFEST_SECTIONS:
                continue
            if section not in allowed_sections:
                raise ValueError(
                    f"[{section}]: unknown section for this experiment "
                    f"(allowed: {', '.join(sorted(allowed_sections))})"
                )
            for key in self.parser.options(section):
                if (section, key) not in self.consumed:
                    raise ValueError(f"[{section}] {key}: unknown key")


def _parse_int(raw: str) -> int:
    return int(raw, 0)


def _parse_float(raw: str) -> float:
    value = float(raw)
    if not np.isfinite(value):
        raise ValueError(f"value must be finite, got {raw!r}")
    return value


def _parse_float_list(raw: str) -> tuple:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ValueError("expected at least one value")
    return tuple(_parse_float(p) for p in parts)


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _parse_choice(choices):
    def convert(raw: str):
        if raw not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}, got {raw!r}")
        return raw

    return convert


def parse_config(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Parse and validate a config, resolving every default.

    ``experiment`` (e.g. from a CLI subcommand) may supply or confirm the
    ``[experiment] kind`` key.  Unknown keys or sections, missing required
    keys, and dimension inconsistencies are rejected with the offending key
    path.  Manifest-only sections (``meta``, ``outputs``, ``notes``) are
    ignored so a manifest can be re-run directly.
    """
    reader = _Reader(text)
    kind = reader.get(
        "experiment", "kind", _parse_choice(EXPERIMENTS), default=experiment
    )
    if kind is None:
        raise ValueError("[experiment] kind: missing required key")
    if experiment is not None and kind != experiment:
        raise ValueError(
            f"[experiment] kind: config says {kind!r} but the {experiment!r} "
            "command was invoked"
        )

    values = {
        "experiment": kind,
        "output_dir": reader.get("experiment", "output_dir", str, default="runs"),
        "system_kind": reader.get("system", "kind", _parse_choice(SYSTEM_KINDS)),
    }
    system_kind = values["system_kind"]
    allowed = {"experiment", "system"}

    if system_kind in ("qkt", "qkt_sector"):
        values["two_j"] = reader.get("system", "two_j", _parse_int)
        if values["two_j"] < 1:
            raise ValueError("[system] two_j: must be a positive integer")
        if kind != "sector_info":
            values["k_values"] = reader.get("system", "k", _parse_float_list)
    if system_kind == "qkt_sector":
        allowed.add("sector")
        values["y_parity"] = reader.get("sector", "y_parity", _parse_choice(("+", "-")))
        values["x_parity"] = reader.get(
            "sector", "x_parity", _parse_choice(("+", "-")), default=None
        )
        # fail early if the sector itself is ill-defined
        sector_dimension(values["two_j"], values["y_parity"], values["x_parity"])
    if system_kind == "interpolating":
        values["n"] = reader.get("system", "n", _parse_int)
        if values["n"] < 2:
            raise ValueError("[system] n: dimension must be >= 2")
        values["delta_values"] = reader.get("system", "delta", _parse_float_list)
        _check_deltas("delta", values["delta_values"])
    if system_kind == "interpolating_blocks":
        values["block_dim"] = reader.get("system", "block_dim", _parse_int)
        if values["block_dim"] < 2:
            raise ValueError("[system] block_dim: block dimension must be >= 2")
        values["block_delta_values"] = reader.get("system", "block_delta", _parse_float_list)
        _check_deltas("block_delta", values["block_delta_values"])

    if kind in ("fidelity", "ldos"):
        allowed |= {"perturbation", "trials", "analysis"}
        values["n_qubits"] = reader.get("perturbation", "n_q", _parse_int)
        values["epsilon_values"] = reader.get("perturbation", "epsilon", _parse_float_list)
        values["axis"] = reader.get("perturbation", "axis", _parse_choice(("z", "x")), default="z")
        values["basis"] = reader.get(
            "perturbation",
            "basis",
            _parse_choice(("identity", "pairing", "collective_x", "random", "custom")),
            default="identity",
        )
        values["basis_seed"] = reader.get("perturbation", "basis_seed", _parse_int, default=None)
        values["basis_file"] = reader.get("perturbation", "basis_file", str, default=None)
        if values["basis"] == "random" and values["basis_seed"] is None:
            raise ValueError("[perturbation] basis_seed: required when basis = random")
        if values["basis"] == "custom" and values["basis_file"] is None:
            raise ValueError("[perturbation] basis_file: required when basis = custom")

    if kind in ("fidelity", "ldos", "ensemble_stats"):
        allowed |= {"trials", "analysis"}
        values["n_states"] = reader.get("trials", "n_states", _parse_int, default=1)
        values["n_operators"] = reader.get("trials", "n_operators", _parse_int, default=1)
        values["master_seed"] = reader.get("trials", "master_seed", _parse_int)
        if values["n_states"] < 1 or values["n_operators"] < 1:
            raise ValueError("[trials]: n_states and n_operators must be >= 1")
        values["n_bins"] = reader.get("analysis", "n_bins", _parse_int, default=spectra.DEFAULT_LDOS_BINS)
        if values["n_bins"] < 1:
            raise ValueError("[analysis] n_bins: must be >= 1")

    if kind == "fidelity":
        values["steps"] = reader.get("experiment", "steps", _parse_int)
        if values["steps"] < 1:
            raise ValueError("[experiment] steps: must be >= 1 for fidelity runs")
        values["f_floor"] = reader.get("analysis", "f_floor", _parse_float, default=0.01)
        if not 0.0 < values["f_floor"] < 1.0:
            raise ValueError("[analysis] f_floor: must lie strictly between 0 and 1")
        values["curvature_threshold"] = reader.get(
            "analysis",
            "curvature_threshold",
            _parse_float,
            default=spectra.CURVATURE_RATIO_THRESHOLD,
        )
        values["with_ldos"] = reader.get("analysis", "with_ldos", _parse_bool, default=False)

    reader.reject_unconsumed(allowed)
    config = ExperimentConfig(**values)
    _validate_consistency(config)
    return config


def _check_deltas(key: str, deltas):
    for d in deltas:
        if not 0.0 <= d <= 1.0:
            raise ValueError(f"[system] {key}: values must lie in [0, 1], got {d}")


def _validate_consistency(config: ExperimentConfig):
    if config.experiment in ("fidelity", "ldos"):
        dim = config.system_dim
        expected = int(dim).bit_length() - 1
        if 2**expected != dim or expected != config.n_qubits:
            raise ValueError(
                f"[perturbation] n_q: n_q = {config.n_qubits} is inconsistent with the "
                f"system dimension {dim}"
                + (f" (expected n_q = {expected})" if 2**expected == dim else " (not a power of two)")
            )
        fixed_system = config.system_kind in ("qkt", "qkt_sector")
        if fixed_system and config.n_operators != 1:
            raise ValueError(
                "[trials] n_operators: must be 1 for deterministic systems "
                f"({config.system_kind})"
            )
    if config.experiment == "ensemble_stats" and config.system_kind != "interpolating":
        raise ValueError("[system] kind: ensemble_stats requires kind = interpolating")
    if config.experiment == "sector_info" and config.system_kind != "qkt_sector":
        raise ValueError("[system] kind: sector_info requires kind = qkt_sector")


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, tuple):
        return ", ".join(_format_value(v) for v in value)
    return str(value)


def render_config(config: ExperimentConfig) -> str:
    """Canonical INI text for a resolved config (parse -> render round-trips)."""
    sections: dict[str, dict] = {"experiment": {"kind": config.experiment}}
    if config.experiment == "fidelity":
        sections["experiment"]["steps"] = config.steps
    sections["experiment"]["output_dir"] = config.output_dir

    system: dict = {"kind": config.system_kind}
    if config.system_kind in ("qkt", "qkt_sector"):
        system["two_j"] = config.two_j
        if config.k_values is not None:
            system["k"] = config.k_values
    if config.system_kind == "interpolating":
        system["n"] = config.n
        system["delta"] = config.delta_values
    if config.system_kind == "interpolating_blocks":
        system["block_dim"] = config.block_dim
        system["block_delta"] = config.block_delta_values
    sections["system"] = system

    if config.system_kind == "qkt_sector":
        sector = {"y_parity": config.y_parity}
        if config.x_parity is not None:
            sector["x_parity"] = config.x_parity
        sections["sector"] = sector

    if config.experiment in ("fidelity", "ldos"):
        pert = {
            "n_q": config.n_qubits,
            "epsilon": config.epsilon_values,
            "axis": config.axis,
            "basis": config.basis,
        }
        if config.basis_seed is not None:
            pert["basis_seed"] = config.basis_seed
        if config.basis_file is not None:
            pert["basis_file"] = config.basis_file
        sections["perturbation"] = pert

    if config.experiment in ("fidelity", "ldos", "ensemble_stats"):
        sections["trials"] = {
            "n_states": config.n_states,
            "n_operators": config.n_operators,
            "master_seed": config.master_seed,
        }
        analysis = {"n_bins": config.n_bins}
        if config.experiment == "fidelity":
            analysis["f_floor"] = config.f_floor
            analysis["curvature_threshold"] = config.curvature_threshold
            analysis["with_ldos"] = config.with_ldos
        sections["analysis"] = analysis

    lines = []
    for name, body in sections.items():
        lines.append(f"[{name}]")
        for key, value in body.items():
            lines.append(f"{key} = {_format_value(value)}")
        lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# running


def _combo_suffix(config: ExperimentConfig, sweep_value, eps) -> str:
    parts = []
    if config.sweep_values is not None and len(config.sweep_values) > 1:
        parts.append(f"{config.sweep_key}{_format_value(sweep_value)}")
    if config.epsilon_values is not None and len(config.epsilon_values) > 1:
        parts.append(f"eps{_format_value(eps)}")
    return ("_" + "_".join(parts)) if parts else ""


def _write_csv(path: Path, header, rows, written: list):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(row) + "\n")
    written.append(path)


def _float_cell(value) -> str:
    return f"{float(value):.17g}"


class _SystemFactory:
    """Builds the evolution operator(s) for a config, caching shared pieces."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.sector = None
        if config.system_kind == "qkt_sector":
            self.sector = sector_basis(config.two_j, config.y_parity, config.x_parity)

    def system(self, sweep_value):
        """A fixed unitary, or a callable(op_seed) for ensemble-sourced kinds."""
        config = self.config
        if config.system_kind == "qkt":
            return kicked_top_floquet(config.two_j, sweep_value)
        if config.system_kind == "qkt_sector":
            full = kicked_top_floquet(config.two_j, sweep_value)
            return restrict_to_sector(full, self.sector)
        if config.system_kind == "interpolating":
            n = config.n
            return lambda op_seed: sample_interpolating(n, sweep_value, op_seed)
        block_dim = config.block_dim

        def build(op_seed):
            a = sample_interpolating(block_dim, sweep_value, mix64(op_seed, 0))
            b = sample_interpolating(block_dim, sweep_value, mix64(op_seed, 1))
            return block_diagonal(a, b)

        return build

    def operators(self, sweep_value, threads: int):
        """Concrete operator list (one per operator trial), in trial order."""
        system = self.system(sweep_value)
        if not callable(system):
            return [system]
        seeds = [
            operator_seed(self.config.master_seed, i)
            for i in range(self.config.n_operators)
        ]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                return list(pool.map(system, seeds))
        return [system(seed) for seed in seeds]


def _perturbation_spec(config: ExperimentConfig, eps: float) -> PerturbationSpec:
    basis_matrix = None
    if config.basis == "custom":
        basis_matrix = np.load(config.basis_file)
    return PerturbationSpec(
        n_qubits=config.n_qubits,
        epsilon=eps,
        axis=config.axis,
        basis=config.basis,
        basis_seed=config.basis_seed,
        basis_matrix=basis_matrix,
    )


def _decay_fit_rows(config: ExperimentConfig, curve, generator, eps):
    rows = [("gamma_rmt", "prediction", _float_cell(rmt_rate(generator, eps)))]
    try:
        fit = spectra.fit_exponential_decay(
            curve, config.f_floor, threshold=config.curvature_threshold
        )
    except ValueError as exc:
        rows.append(("classification", "unfit", _float_cell(np.nan)))
        return rows, f"decay fit skipped: {exc}"
    rows += [
        ("gamma_fit", "loglinear", _float_cell(fit.rate)),
        ("c2", "quadratic", _float_cell(fit.c2)),
        ("r_squared", "loglinear", _float_cell(fit.r_squared)),
        ("window_lo", "loglinear", _float_cell(fit.window[0])),
        ("window_hi", "loglinear", _float_cell(fit.window[1])),
        ("classification", fit.model, _float_cell(fit.curvature_ratio)),
    ]
    return rows, None


def _ldos_outputs(config, factory, sweep_value, kick, suffix, out_dir, written, threads):
    operators = factory.operators(sweep_value, threads)

    def one(u):
        return spectra.ldos(u, u @ kick, config.n_bins)

    if threads > 1 and len(operators) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hists = list(pool.map(one, operators))
    else:
        hists = [one(u) for u in operators]
    hist = spectra.average_histograms(hists)
    _write_csv(
        out_dir / f"ldos{suffix}.csv",
        ("bin_center", "density"),
        [
            (_float_cell(c), _float_cell(d))
            for c, d in zip(hist.bin_centers, hist.densities)
        ],
        written,
    )
    rows = []
    for model in ("lorentzian", "gaussian"):
        try:
            fit = spectra.fit_ldos(hist, model)
            rows += [
                ("width", model, _float_cell(fit.width)),
                ("center", model, _float_cell(fit.center)),
                ("rss", model, _float_cell(fit.rss)),
            ]
        except spectra.FitError:
            rows.append(("rss", model, _float_cell(np.nan)))
    _write_csv(out_dir / f"ldos_fits{suffix}.csv", ("quantity", "model", "value"), rows, written)


def run_experiment(
    config: ExperimentConfig, threads: int = 1, verbose: bool = False
) -> RunManifest:
    """Execute a config and write CSVs plus a manifest into ``output_dir``.

    Deterministic for a fixed config: outputs are byte-identical across runs
    and across ``threads`` values.  On error, files written so far are removed
    and the error is re-raised with the failing stage.
    """
    start = time.monotonic()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    notes: dict[str, str] = {}

    def log(message: str):
        if verbose:
            print(message)

    try:
        if config.experiment == "fidelity":
            _run_fidelity(config, out_dir, written, notes, threads, log)
        elif config.experiment == "ldos":
            _run_ldos(config, out_dir, written, notes, threads, log)
        elif config.experiment == "ensemble_stats":
            _run_ensemble_stats(config, out_dir, written, notes, log)
        else:
            _run_sector_info(config, out_dir, written, notes, log)
    except Exception as exc:
        for path in written:
            path.unlink(missing_ok=True)
        raise RuntimeError(f"{config.experiment} run aborted: {exc}") from exc

    outputs = {
        path.name: hashlib.sha256(path.read_bytes()).hexdigest() for path in written
    }
    duration = time.monotonic() - start
    manifest_path = out_dir / "manifest.txt"
    manifest = RunManifest(
        path=manifest_path,
        config=config,
        outputs=outputs,
        notes=dict(notes),
        duration_seconds=duration,
    )
    _write_manifest(manifest)
    log(f"wrote {len(outputs)} output file(s) and {manifest_path}")
    return manifest


def _run_fidelity(config, out_dir, written, notes, threads, log):
    factory = _SystemFactory(config)
    if factory.sector is not None:
        notes["sector_dim"] = str(factory.sector.sector_dim)
        notes["rate_caveat"] = (
            "fitted and predicted rates use rate = epsilon^2 * mean(lambda_i^2) "
            "with V = sum_j sigma_z^j / 2; external reference values for the "
            "restricted top (e.g. 0.405 at kick strength 7) assume an unstated "
            "normalization and are annotations only"
        )
    for sweep_value in config.sweep_values:
        system = factory.system(sweep_value)
        for eps in config.epsilon_values:
            suffix = _combo_suffix(config, sweep_value, eps)
            log(f"fidelity combo {config.sweep_key} = {sweep_value}, epsilon = {eps}")
            generator, kick = realize(_perturbation_spec(config, eps), config.system_dim)
            curve = echo.averaged_fidelity(
                system,
                kick,
                config.n_states,
                config.n_operators,
                config.master_seed,
                config.steps,
                threads=threads,
            )
            stderr = curve.stderr if curve.stderr is not None else np.zeros(len(curve))
            _write_csv(
                out_dir / f"fidelity{suffix}.csv",
                ("t", "F_mean", "F_stderr"),
                [
                    (str(int(t)), _float_cell(f), _float_cell(s))
                    for t, f, s in zip(curve.steps, curve.values, stderr)
                ],
                written,
            )
            rows, warning = _decay_fit_rows(config, curve, generator, eps)
            if warning:
                notes[f"fit{suffix or '_0'}"] = warning
            _write_csv(
                out_dir / f"fits{suffix}.csv", ("quantity", "model", "value"), rows, written
            )
            if config.with_ldos:
                _ldos_outputs(
                    config, factory, sweep_value, kick, suffix, out_dir, written, threads
                )


def _run_ldos(config, out_dir, written, notes, threads, log):
    factory = _SystemFactory(config)
    if factory.sector is not None:
        notes["sector_dim"] = str(factory.sector.sector_dim)
    for sweep_value in config.sweep_values:
        for eps in config.epsilon_values:
            suffix = _combo_suffix(config, sweep_value, eps)
            log(f"ldos combo {config.sweep_key} = {sweep_value}, epsilon = {eps}")
            _, kick = realize(_perturbation_spec(config, eps), config.system_dim)
            _ldos_outputs(
                config, factory, sweep_value, kick, suffix, out_dir, written, threads
            )


def _run_ensemble_stats(config, out_dir, written, notes, log):
    for delta in config.delta_values:
        suffix = (
            f"_delta{_format_value(delta)}" if len(config.delta_values) > 1 else ""
        )
        log(f"ensemble_stats delta = {delta}, {config.n_operators} samples")
        samples = [
            sample_interpolating(
                config.n, delta, operator_seed(config.master_seed, i)
            )
            for i in range(config.n_operators)
        ]
        hist = spacing_distribution(samples, n_bins=config.n_bins)
        _write_csv(
            out_dir / f"spacings{suffix}.csv",
            ("bin_center", "density"),
            [
                (_float_cell(c), _float_cell(d))
                for c, d in zip(hist.bin_centers, hist.densities)
            ],
            written,
        )
        rows = [
            ("ks_stat", "poisson", _float_cell(hist.ks_poisson[0])),
            ("ks_pvalue", "poisson", _float_cell(hist.ks_poisson[1])),
            ("ks_stat", "wigner2", _float_cell(hist.ks_wigner[0])),
            ("ks_pvalue", "wigner2", _float_cell(hist.ks_wigner[1])),
            ("mean_spacing", "unfolded", _float_cell(hist.spacings.mean())),
            ("sample_count", "count", _float_cell(hist.sample_count)),
        ]
        _write_csv(
            out_dir / f"spacing_stats{suffix}.csv",
            ("quantity", "model", "value"),
            rows,
            written,
        )


def _run_sector_info(config, out_dir, written, notes, log):
    transform = sector_basis(config.two_j, config.y_parity, config.x_parity)
    notes["sector_dim"] = str(transform.sector_dim)
    counted = sector_dimension(config.two_j, config.y_parity, config.x_parity)
    log(f"sector ({config.y_parity}, {config.x_parity}): dimension {transform.sector_dim}")
    rows = [
        ("source_dim", "count", _float_cell(transform.source_dim)),
        ("sector_dim", "count", _float_cell(transform.sector_dim)),
        ("sector_dim_by_counting", "count", _float_cell(counted)),
        ("isometry_defect", "maxnorm", _float_cell(_isometry_defect(transform))),
    ]
    _write_csv(out_dir / "sector.csv", ("quantity", "model", "value"), rows, written)


def _isometry_defect(transform) -> float:
    s = transform.isometry
    return float(
        np.abs(s.conj().T @ s - np.eye(transform.sector_dim)).max()
    )


def _write_manifest(manifest: RunManifest):
    lines = [
        "[meta]",
        "artifact = symfid",
        f"version = {manifest.version}",
        f"seed_derivation = {manifest.seed_fn}",
        f"duration_seconds = {manifest.duration_seconds:.3f}",
        "",
        render_config(manifest.config).rstrip(),
        "",
        "[outputs]",
    ]
    for name in sorted(manifest.outputs):
        lines.append(f"{name} = sha256:{manifest.outputs[name]}")
    if manifest.notes:
        lines.append("")
        lines.append("[notes]")
        for key in sorted(manifest.notes):
            lines.append(f"{key} = {manifest.notes[key]}")
    manifest.path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def override(config: ExperimentConfig, **changes) -> ExperimentConfig:
    """Replace fields on a resolved config (used for CLI flag overrides)."""
    valid = {f.name for f in fields(ExperimentConfig)}
    unknown = set(changes) - valid
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    return replace(config, **changes)
