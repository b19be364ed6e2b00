"""Scan engine: validated configs, frequency sweeps, CSV + manifest output.

A scan is described by a JSON document (see README for the schema); the
engine validates it exhaustively (all errors reported, unknown keys
rejected), runs the frequency grid -- in parallel where workers are
available -- and writes one CSV row per grid frequency plus a JSON manifest
that makes every row auditable.  Per-point solver failures become NaN rows
and never abort a sweep; the output files are written atomically.
"""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .atomic import AtomSpec, atom_validation_errors
from .diffusion import diffusion_matrix
from .liouville import DriveSpec, build_system, steady_state
from .propagation import (
    DopplerSpec,
    MediumSpec,
    PropagationResult,
    QuadratureConvergenceError,
    VelocityFamily,
    doppler_spectrum,
    output_spectrum,
    vacuum_input,
)
from .spectra import AnalysisBasis, NoiseRecord, noise_powers, record_from_spectrum, rotate

__all__ = [
    "ConfigError",
    "ScanConfig",
    "ScanResult",
    "validate_config",
    "run_scan",
    "CSV_BASE_COLUMNS",
]

log = logging.getLogger(__name__)

WORKERS_ENV_VAR = "ATOMNOISE_WORKERS"

CSV_BASE_COLUMNS = [
    "omega",
    "s1_amp",
    "s1_phase",
    "s2_amp",
    "s2_phase",
    "re_corr",
    "im_corr",
    "duan_sum",
]
CSV_DECOMPOSE_COLUMNS = [
    f"{col}_{part}"
    for part in ("semiclassical", "quantum")
    for col in ("s1_amp", "s1_phase", "s2_amp", "s2_phase")
]


class ConfigError(ValueError):
    """Invalid scan configuration; ``errors`` lists every violation."""

    def __init__(self, errors: list[str]):
        super().__init__("invalid configuration:\n  " + "\n  ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class OmegaGrid:
    omega_min: float
    omega_max: float
    count: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.omega_min, self.omega_max, self.count)
        return np.linspace(self.omega_min, self.omega_max, self.count)


@dataclass(frozen=True)
class AnalysisSpec:
    basis_name: str = "xy"
    R: np.ndarray = field(default_factory=lambda: np.eye(4, dtype=complex), repr=False)
    quadratures: tuple = (0.0, math.pi / 2.0)


@dataclass(frozen=True)
class ScanConfig:
    atom: AtomSpec
    drive: DriveSpec
    medium: MediumSpec
    grid: OmegaGrid
    analysis: AnalysisSpec = field(default_factory=AnalysisSpec)
    decompose: bool = False
    csv_path: Path | None = None
    manifest_path: Path | None = None
    raw: dict = field(default_factory=dict, repr=False)


# ---------------------------------------------------------------------------
# Validation


_TOP_SHORTHAND = {
    "Fg": ("atom", "Fg"),
    "Fe": ("atom", "Fe"),
    "b": ("atom", "b"),
    "gamma": ("atom", "gamma"),
    "delta": ("drive", "delta"),
    "omega_r": ("drive", "omega_r"),
    "C": ("medium", "C"),
}

_SECTION_KEYS = {
    "atom": {"Fg", "Fe", "b", "gamma", "Gamma", "zeeman_g", "zeeman_e"},
    "drive": {"delta", "omega_r", "polarization"},
    "medium": {"C", "doppler"},
    "grid": {"omega_min", "omega_max", "count", "spacing"},
    "analysis": {"basis", "quadratures"},
    "doppler": {"width_fwhm", "nodes", "rel_tol", "max_nodes"},
    "outputs": {"csv", "manifest"},
}

_GRID_DEFAULTS = {"omega_min": 0.01, "omega_max": 20.0, "count": 400, "spacing": "linear"}


def _number(raw: dict, section: str, key: str, errors: list[str], default=None):
    path = f"{section}.{key}" if section else key
    if key not in raw:
        return default
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{path}: expected a number, got {value!r}")
        return default
    return float(value)


def _merge_shorthand(data: dict, errors: list[str]) -> dict:
    """Fold documented top-level shorthand keys into their sections."""
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in data.items()}
    for key, (section, target) in _TOP_SHORTHAND.items():
        if key not in out:
            continue
        sect = out.setdefault(section, {})
        if not isinstance(sect, dict):
            continue
        if target in sect:
            errors.append(f"{key}: duplicates {section}.{target}")
        else:
            sect[target] = out[key]
        del out[key]
    return out


def _check_unknown(raw: dict, section: str, errors: list[str]) -> None:
    allowed = _SECTION_KEYS[section]
    for key in raw:
        if key not in allowed:
            errors.append(f"{section}.{key}: unknown key")


def _parse_analysis(raw: dict, errors: list[str]) -> AnalysisSpec:
    _check_unknown(raw, "analysis", errors)
    basis = raw.get("basis", "xy")
    name, r_matrix = "xy", np.eye(4, dtype=complex)
    if isinstance(basis, str):
        if basis in ("xy",):
            pass
        elif basis in ("pm45", "+-45", "±45"):
            name = "pm45"
            r_matrix = AnalysisBasis.diagonal_45().R
        else:
            errors.append(f"analysis.basis: unknown basis {basis!r}")
    elif isinstance(basis, list):
        try:
            jones = np.array(
                [[complex(c[0], c[1]) for c in row] for row in basis], dtype=complex
            )
            name = "custom"
            r_matrix = AnalysisBasis.from_jones(jones).R
        except (ValueError, TypeError, IndexError):
            errors.append(
                "analysis.basis: custom basis must be a 2x2 matrix of [re, im] pairs "
                "forming a unitary"
            )
    else:
        errors.append("analysis.basis: expected a name or a 2x2 unitary")
    quads = raw.get("quadratures", [0.0, math.pi / 2.0])
    if not isinstance(quads, list) or not all(
        isinstance(q, (int, float)) and not isinstance(q, bool) for q in quads
    ):
        errors.append("analysis.quadratures: expected a list of angles (radians)")
        quads = [0.0, math.pi / 2.0]
    return AnalysisSpec(basis_name=name, R=r_matrix, quadratures=tuple(float(q) for q in quads))


def validate_config(raw) -> ScanConfig:
    """Parse and validate a scan configuration (JSON text, path, or dict).

    Either returns a fully defaulted ScanConfig or raises ConfigError whose
    ``errors`` attribute names every violation with its field path.
    """
    if isinstance(raw, (str, Path)):
        text = Path(raw).read_text() if isinstance(raw, Path) else raw
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"not valid JSON: {exc}"]) from exc
    else:
        data = raw
    if not isinstance(data, dict):
        raise ConfigError(["top level must be a JSON object"])

    errors: list[str] = []
    data = _merge_shorthand(data, errors)

    known_top = {"atom", "drive", "medium", "grid", "analysis", "doppler", "outputs", "decompose"}
    for key in data:
        if key not in known_top:
            errors.append(f"{key}: unknown key")

    for section in ("atom", "drive", "medium", "grid", "analysis", "doppler", "outputs"):
        if section in data and not isinstance(data[section], dict):
            errors.append(f"{section}: expected an object")
            data[section] = {}

    atom_raw = data.get("atom", {})
    _check_unknown(atom_raw, "atom", errors)
    if "Fg" not in atom_raw or "Fe" not in atom_raw:
        errors.append("atom: Fg and Fe are required")
    atom = None
    kwargs = {}
    for key, default in (
        ("Fg", None),
        ("Fe", None),
        ("b", 1.0),
        ("gamma", 0.01),
        ("Gamma", 1.0),
        ("zeeman_g", 0.0),
        ("zeeman_e", 0.0),
    ):
        value = _number(atom_raw, "atom", key, errors, default)
        if value is not None:
            kwargs[key] = value
    if "Fg" in kwargs and "Fe" in kwargs:
        atom_errors = atom_validation_errors(**kwargs)
        if atom_errors:
            errors.extend(f"atom: {msg}" for msg in atom_errors)
        else:
            atom = AtomSpec(**kwargs)

    drive_raw = data.get("drive", {})
    _check_unknown(drive_raw, "drive", errors)
    delta = _number(drive_raw, "drive", "delta", errors, 0.0)
    omega_r = _number(drive_raw, "drive", "omega_r", errors, 0.0)
    drive = None
    if omega_r is not None and omega_r < 0:
        errors.append("drive.omega_r: must be >= 0")
    else:
        drive = DriveSpec(delta=delta or 0.0, omega_r=omega_r or 0.0)

    medium_raw = data.get("medium", {})
    _check_unknown(medium_raw, "medium", errors)
    c_value = _number(medium_raw, "medium", "C", errors, None)
    if c_value is None:
        errors.append("medium.C: required")
        c_value = 0.0
    elif c_value < 0:
        errors.append("medium.C: must be >= 0")
        c_value = 0.0

    doppler_raw = data.get("doppler", medium_raw.get("doppler"))
    if "doppler" in data and isinstance(medium_raw.get("doppler"), dict):
        errors.append("doppler: given both at top level and inside medium")
    doppler = None
    if doppler_raw is not None:
        if not isinstance(doppler_raw, dict):
            errors.append("doppler: expected an object")
        else:
            _check_unknown(doppler_raw, "doppler", errors)
            width = _number(doppler_raw, "doppler", "width_fwhm", errors, None)
            if width is None:
                errors.append("doppler.width_fwhm: required")
            elif width <= 0:
                errors.append("doppler.width_fwhm: must be > 0")
            else:
                kwargs = {"width_fwhm": width}
                for key in ("nodes", "max_nodes"):
                    value = _number(doppler_raw, "doppler", key, errors, None)
                    if value is not None:
                        if value < 1 or value != int(value):
                            errors.append(f"doppler.{key}: must be a positive integer")
                        else:
                            kwargs[key] = int(value)
                rel_tol = _number(doppler_raw, "doppler", "rel_tol", errors, None)
                if rel_tol is not None:
                    if rel_tol <= 0:
                        errors.append("doppler.rel_tol: must be > 0")
                    else:
                        kwargs["rel_tol"] = rel_tol
                doppler = DopplerSpec(**kwargs)

    grid_raw = dict(_GRID_DEFAULTS)
    grid_raw.update(data.get("grid", {}))
    _check_unknown(grid_raw, "grid", errors)
    spacing = grid_raw.get("spacing", "linear")
    if spacing not in ("linear", "log"):
        errors.append(f"grid.spacing: must be 'linear' or 'log', got {spacing!r}")
        spacing = "linear"
    omega_min = _number(grid_raw, "grid", "omega_min", errors, 0.01)
    omega_max = _number(grid_raw, "grid", "omega_max", errors, 20.0)
    count_val = grid_raw.get("count", 400)
    if isinstance(count_val, bool) or not isinstance(count_val, int):
        errors.append(f"grid.count: expected an integer, got {count_val!r}")
        count_val = 2
    if count_val < 2:
        errors.append("grid.count: must be >= 2")
    if omega_min is not None and omega_max is not None:
        if omega_min > omega_max:
            errors.append("grid: omega_min must be <= omega_max")
        if spacing == "log" and omega_min <= 0:
            errors.append("grid.omega_min: must be > 0 for log spacing")
        if spacing == "linear" and omega_min < 0:
            errors.append("grid.omega_min: must be >= 0")

    analysis = _parse_analysis(data.get("analysis", {}), errors)

    decompose = data.get("decompose", False)
    if not isinstance(decompose, bool):
        errors.append("decompose: expected true or false")
        decompose = False

    outputs_raw = data.get("outputs", {})
    _check_unknown(outputs_raw, "outputs", errors)
    csv_path = outputs_raw.get("csv")
    manifest_path = outputs_raw.get("manifest")
    for key, value in (("csv", csv_path), ("manifest", manifest_path)):
        if value is not None and not isinstance(value, str):
            errors.append(f"outputs.{key}: expected a path string")

    if errors:
        raise ConfigError(errors)

    return ScanConfig(
        atom=atom,
        drive=drive,
        medium=MediumSpec(C=c_value, doppler=doppler),
        grid=OmegaGrid(omega_min, omega_max, count_val, spacing),
        analysis=analysis,
        decompose=decompose,
        csv_path=Path(csv_path) if isinstance(csv_path, str) else None,
        manifest_path=Path(manifest_path) if isinstance(manifest_path, str) else None,
        raw=data,
    )


# ---------------------------------------------------------------------------
# Scan execution


@dataclass
class RowResult:
    omega: float
    record: NoiseRecord | None
    semiclassical: NoiseRecord | None = None
    quantum: NoiseRecord | None = None
    extra_powers: list = field(default_factory=list)
    status: str = "ok"
    detail: str | None = None
    has_gain: bool = False


@dataclass
class ScanResult:
    config: ScanConfig
    rows: list[RowResult]
    manifest: dict

    @property
    def records(self) -> list[NoiseRecord | None]:
        return [r.record for r in self.rows]

    @property
    def ok(self) -> bool:
        return all(r.status == "ok" for r in self.rows)


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV_VAR)
        if env is not None:
            try:
                workers = int(env)
            except ValueError:
                workers = None
    if workers is None or workers < 1:
        workers = os.cpu_count() or 1
    return workers


def _parallel_map(fn, items, workers: int):
    """Order-preserving map; results identical for any worker count."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _quantum_part_record(result: PropagationResult, omega: float, r_matrix) -> NoiseRecord:
    # The quantum term is a noise *increment*: no vacuum floor to subtract.
    return record_from_spectrum(np.asarray(result.quantum), omega, r_matrix)


def _row_from_result(
    result: PropagationResult, omega: float, config: ScanConfig
) -> RowResult:
    r_matrix = config.analysis.R
    record = record_from_spectrum(result.total, omega, r_matrix)
    semic = quant = None
    if config.decompose:
        semic = record_from_spectrum(np.asarray(result.semiclassical), omega, r_matrix)
        quant = _quantum_part_record(result, omega, r_matrix)
    extras = [
        noise_powers(rotate(result.total, AnalysisBasis(theta=theta, R=r_matrix)))
        for theta in _extra_thetas(config)
    ]
    return RowResult(
        omega=omega,
        record=record,
        semiclassical=semic,
        quantum=quant,
        extra_powers=extras,
        status="fallback" if result.sylvester_fallback else "ok",
        detail="sylvester fallback to direct quadrature" if result.sylvester_fallback else None,
        has_gain=result.has_gain,
    )


def _failed_row(omega: float, exc: Exception) -> RowResult:
    return RowResult(
        omega=omega, record=None, status="failed", detail=f"{type(exc).__name__}: {exc}"
    )


def _run_at_rest(config: ScanConfig, omegas: np.ndarray, workers: int) -> list[RowResult]:
    sysm = build_system(config.atom, config.drive)
    steady = steady_state(sysm)
    diff = diffusion_matrix(sysm, steady)
    s0 = vacuum_input()

    def one(omega: float) -> RowResult:
        try:
            result = output_spectrum(sysm, steady, diff, config.medium, s0, omega)
            return _row_from_result(result, omega, config)
        except Exception as exc:  # per-point failures must not abort the sweep
            return _failed_row(omega, exc)

    return _parallel_map(one, list(omegas), workers)


def _run_doppler(
    config: ScanConfig, omegas: np.ndarray, workers: int
) -> tuple[list[RowResult], int | None]:
    dop = config.medium.doppler
    s0 = vacuum_input()

    def scan(count: int) -> list:
        family = VelocityFamily.from_thermal(
            config.atom, config.drive, dop.width_fwhm, count
        )

        def one(omega: float):
            try:
                return doppler_spectrum(family, config.medium, s0, omega)
            except Exception as exc:
                return exc

        return _parallel_map(one, list(omegas), workers)

    nodes = dop.nodes
    prev = scan(nodes)
    while True:
        cur = scan(2 * nodes)
        rel = 0.0
        for a, b in zip(prev, cur):
            if isinstance(a, Exception) or isinstance(b, Exception):
                continue
            denom = max(float(np.linalg.norm(b.total)), 1e-300)
            rel = max(rel, float(np.linalg.norm(a.total - b.total)) / denom)
        if rel <= dop.rel_tol:
            nodes_used = 2 * nodes
            break
        nodes *= 2
        prev = cur
        if 2 * nodes > dop.max_nodes:
            detail = (
                f"velocity quadrature not converged at {nodes} nodes "
                f"(relative change {rel:.2e} > {dop.rel_tol:.0e}); "
                f"retry with at least {4 * nodes} nodes"
            )
            exc = QuadratureConvergenceError(detail, suggested_nodes=4 * nodes)
            return [_failed_row(w, exc) for w in omegas], None

    rows = []
    for omega, result in zip(omegas, cur):
        if isinstance(result, Exception):
            rows.append(_failed_row(omega, result))
        else:
            rows.append(_row_from_result(result, omega, config))
    return rows, nodes_used


def _format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return repr(float(x))


def _extra_thetas(config: ScanConfig) -> list[float]:
    return [
        q for q in config.analysis.quadratures
        if not (math.isclose(q, 0.0, abs_tol=1e-12) or math.isclose(q, math.pi / 2, abs_tol=1e-12))
    ]


def _csv_columns(config: ScanConfig) -> list[str]:
    cols = list(CSV_BASE_COLUMNS)
    if config.decompose:
        cols += CSV_DECOMPOSE_COLUMNS
    for i, _ in enumerate(_extra_thetas(config)):
        cols += [f"s1_theta{i}", f"s2_theta{i}"]
    return cols


def _csv_row(row: RowResult, config: ScanConfig) -> list[str]:
    values: list[float] = [row.omega]
    rec = row.record
    if rec is None:
        values += [math.nan] * (len(_csv_columns(config)) - 1)
        return [_format_float(v) for v in values]
    values += [
        rec.s1_amp, rec.s1_phase, rec.s2_amp, rec.s2_phase,
        rec.cross_corr.real, rec.cross_corr.imag, rec.duan_sum,
    ]
    if config.decompose:
        for part in (row.semiclassical, row.quantum):
            values += [part.s1_amp, part.s1_phase, part.s2_amp, part.s2_phase]
    for s1, s2 in row.extra_powers:
        values += [s1, s2]
    return [_format_float(v) for v in values]


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_scan(
    config: ScanConfig, *, workers: int | None = None, csv_path=None, manifest_path=None
) -> ScanResult:
    """Run a frequency sweep and (optionally) write CSV and manifest files.

    Output is deterministic and independent of the worker count; paths given
    here override the config's ``outputs`` section.
    """
    t_start = time.monotonic()
    workers = _resolve_workers(workers)
    omegas = config.grid.values()

    doppler_nodes = None
    if config.medium.doppler is not None:
        rows, doppler_nodes = _run_doppler(config, omegas, workers)
    else:
        rows = _run_at_rest(config, omegas, workers)

    gain_rows = sum(1 for r in rows if r.has_gain)
    if gain_rows:
        log.warning(
            "propagation exponent has gain at %d of %d grid points "
            "(recorded per row in the manifest)", gain_rows, len(rows),
        )

    csv_target = Path(csv_path) if csv_path else config.csv_path
    manifest_target = Path(manifest_path) if manifest_path else config.manifest_path
    if manifest_target is None and csv_target is not None:
        manifest_target = csv_target.with_suffix(csv_target.suffix + ".manifest.json")

    lines = [",".join(_csv_columns(config))]
    for row in rows:
        lines.append(",".join(_csv_row(row, config)))
    csv_text = "\n".join(lines) + "\n"

    manifest = {
        "generator": f"atomnoise {__version__}",
        "config": config.raw,
        "workers": workers,
        "wall_time_s": round(time.monotonic() - t_start, 3),
        "doppler_nodes": doppler_nodes,
        "status": "ok" if all(r.status != "failed" for r in rows) else "partial",
        "rows": [
            {
                "omega": row.omega,
                "status": row.status,
                "detail": row.detail,
                "gain": row.has_gain,
            }
            for row in rows
        ],
    }

    if csv_target is not None:
        _atomic_write(csv_target, csv_text)
    if manifest_target is not None:
        _atomic_write(manifest_target, json.dumps(manifest, indent=2) + "\n")

    return ScanResult(config=config, rows=rows, manifest=manifest)
