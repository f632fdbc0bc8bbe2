"""Batch front end: ``qdce <mode> [options]``.

Configuration comes from an optional file (``key = value`` lines with ``#``
comments, or one JSON object) and is overridden by command-line flags.
Every validation problem is collected before anything runs.

Exit status: 0 success, 1 invalid input, 2 numerical-invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterable

import numpy as np

from qdce import dynamics
from qdce.errors import NumericalInvariantError
from qdce.hilbert import TwoQubitDensity, basis_labels, fidelity_up_to_global_phase
from qdce.ideal import IdealParams, ideal_joint_distribution, wave_state
from qdce.measurement import (
    EMPTY_BRANCH,
    WAVE,
    branch_state,
    concurrence,
    joint_distribution,
    visibility,
    white_noise_mix,
)
from qdce.protocol import (
    PAPER_OFFSET,
    PAPER_SLOPE,
    PhaseMapping,
    ProtocolParams,
    cavity_vacuum_population,
    displayed_state,
    final_two_atom_state,
    fit_phase_mapping,
    run_protocol,
)

log = logging.getLogger("qdce")

MODES = ("simulate", "sweep", "checkpoints", "compare", "fit-phase")
FORMATS = ("csv", "json-lines")
ALIASES = {"out": "output_path", "format": "output_format"}

SWEEP_COLUMNS = ("alpha", "vartheta", "P00", "P01", "P10", "P11", "visibility_marginal",
                 "concurrence", "cavity_vacuum_population", "branch_fidelity_vs_ideal")
COMPARE_COLUMNS = ("alpha", "vartheta", "phi_model", "wave_branch_fidelity",
                   "max_distribution_deviation")
CHECKPOINT_COLUMNS = ("label", "index", "basis", "real", "imag", "fidelity_vs_displayed",
                      "settings")
FIT_COLUMNS = ("alpha", "n_points", "slope", "offset", "residual", "affine", "paper_slope",
               "paper_offset", "slope_deviation", "offset_deviation")

# phase mapping used to build the ideal comparison: reference alpha and grid
MAPPING_ALPHA = np.pi / 4
MAPPING_GRID = tuple(np.linspace(0, 2 * np.pi, 9))
# vartheta samples for the marginal visibility; includes pi/2 and 3pi/2
VISIBILITY_SAMPLES = 16
SUM_TOL = 1e-9


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class RunConfig:
    mode: str
    alpha: float | None = None
    alpha_grid: tuple[float, float, int] | None = None
    vartheta: float | None = None
    vartheta_grid: tuple[float, float, int] | None = None
    n_max: int = 2
    epsilon: float = 0.0
    convention: str = dynamics.HAMILTONIAN
    output_path: str | None = None
    output_format: str = "csv"

    def alphas(self) -> list[float]:
        return _values(self.alpha, self.alpha_grid)

    def varthetas(self) -> list[float]:
        return _values(self.vartheta, self.vartheta_grid)


def _values(scalar, grid) -> list[float]:
    if grid is not None:
        return np.linspace(grid[0], grid[1], grid[2]).tolist()
    return [] if scalar is None else [scalar]


# --- parsing -----------------------------------------------------------------

def _real(raw) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (str, int, float)):
        raise ValueError(f"expected a real number, got {raw!r}")
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"expected a real number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {raw!r}")
    return value


def _angle(raw) -> float:
    if isinstance(raw, str) and raw.strip().lower().startswith("deg:"):
        raise ValueError("angles are accepted in radians only; 'deg:' is not supported")
    try:
        return _real(raw)
    except ValueError:
        raise ValueError(f"expected a real number (radians), got {raw!r}") from None


def _count(raw) -> int:
    if isinstance(raw, bool):
        raise ValueError(f"expected an integer, got {raw!r}")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, float) and raw.is_integer():
        return int(raw)
    try:
        return int(str(raw).strip())
    except ValueError:
        raise ValueError(f"expected an integer, got {raw!r}") from None


def _grid(raw) -> tuple[float, float, int]:
    parts = raw.split(":") if isinstance(raw, str) else raw
    if not isinstance(parts, (list, tuple)) or len(parts) != 3:
        raise ValueError(f"expected a grid 'start:stop:count', got {raw!r}")
    start, stop, count = _angle(parts[0]), _angle(parts[1]), _count(parts[2])
    if count < 2:
        raise ValueError(f"grid needs count >= 2, got {count}")
    if not start < stop:
        raise ValueError(f"grid needs start < stop, got {start!r}:{stop!r}")
    return start, stop, count


def _choice(options):
    def convert(raw):
        value = str(raw).strip()
        if value not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {raw!r}")
        return value
    return convert


def _n_max(raw) -> int:
    n = _count(raw)
    if n < 1:
        raise ValueError(f"n_max must be >= 1, got {n}")
    return n


def _epsilon(raw) -> float:
    eps = _real(raw)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {raw!r}")
    return eps


def _convention(raw) -> str:
    return dynamics.normalize_convention(str(raw))


CONVERTERS = {
    "mode": _choice(MODES),
    "alpha": _angle,
    "alpha_grid": _grid,
    "vartheta": _angle,
    "vartheta_grid": _grid,
    "n_max": _n_max,
    "epsilon": _epsilon,
    "convention": _convention,
    "output_path": lambda raw: str(raw),
    "output_format": _choice(FORMATS),
}


def _read_entries(text: str, source: str) -> tuple[list[tuple[str, Any, str]], list[str]]:
    entries, errors = [], []
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            return [], [f"{source}: invalid JSON document ({exc})"]
        if not isinstance(doc, dict):
            return [], [f"{source}: expected a single JSON object"]
        for key, value in doc.items():
            entries.append((key, value, f"{source}: key {key!r}"))
        return entries, errors
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        where = f"{source}: line {lineno}"
        if "=" not in stripped:
            errors.append(f"{where}: expected 'key = value', got {line.strip()!r}")
            continue
        key, value = (part.strip() for part in stripped.split("=", 1))
        entries.append((key, value, where))
    return entries, errors


def parse_config(text: str = "", overrides: dict[str, Any] | None = None,
                 source: str = "config") -> RunConfig:
    """Build a validated RunConfig from config text plus flag overrides.

    ``overrides`` maps field names (or ``--flag`` style names) to raw values
    and wins over the file.  Raises ConfigError listing every problem found.
    """
    entries, errors = _read_entries(text, source)
    for flag, value in (overrides or {}).items():
        if value is not None:
            entries.append((flag.lstrip("-").replace("-", "_"), value, f"flag --{flag.lstrip('-')}"))

    values: dict[str, Any] = {}
    provenance: dict[str, str] = {}
    for key, raw, where in entries:
        name = ALIASES.get(key, key)
        if name not in CONVERTERS:
            errors.append(f"{where}: unknown key {key!r}")
            continue
        if name in provenance and not where.startswith("flag") \
                and not provenance[name].startswith("flag"):
            errors.append(f"{where}: duplicate key {key!r} (first set at {provenance[name]})")
            continue
        try:
            values[name] = CONVERTERS[name](raw)
            provenance[name] = where
        except ValueError as exc:
            errors.append(f"{where}: {name}: {exc}")
            values.pop(name, None)
            provenance[name] = where

    errors.extend(_check_mode_fields(values, provenance))
    if errors:
        raise ConfigError(errors)
    return RunConfig(**values)


def _check_mode_fields(values: dict, provenance: dict) -> list[str]:
    mode = values.get("mode")
    if mode is None:
        return [] if "mode" in provenance else ["missing required field 'mode'"]
    errors = []
    present = set(provenance)

    def unused(*names):
        for name in names:
            if name in present:
                errors.append(f"{provenance[name]}: {name} is not used by mode {mode!r}")

    def one_of(scalar, grid):
        if scalar in present and grid in present:
            errors.append(f"mode {mode!r}: give {scalar} or {grid}, not both")
        elif scalar not in present and grid not in present:
            errors.append(f"mode {mode!r}: missing required field {scalar!r} or {grid!r}")

    if mode in ("simulate", "checkpoints"):
        unused("alpha_grid", "vartheta_grid")
        for name in ("alpha", "vartheta"):
            if name not in present:
                errors.append(f"mode {mode!r}: missing required field {name!r}")
    elif mode in ("sweep", "compare"):
        one_of("alpha", "alpha_grid")
        one_of("vartheta", "vartheta_grid")
    elif mode == "fit-phase":
        unused("alpha_grid", "vartheta", "epsilon")
        if "vartheta_grid" not in present:
            errors.append("mode 'fit-phase': missing required field 'vartheta_grid'")
        elif values.get("vartheta_grid") and values["vartheta_grid"][2] < 5:
            errors.append(f"{provenance['vartheta_grid']}: fit-phase needs at least 5 points")
    return errors


# --- records -----------------------------------------------------------------

@lru_cache(maxsize=None)
def reference_mapping(n_max: int, convention: str) -> PhaseMapping:
    return fit_phase_mapping(MAPPING_GRID, MAPPING_ALPHA, n_max, convention)


def _noisy(psi, epsilon: float) -> TwoQubitDensity:
    return white_noise_mix(TwoQubitDensity.from_state(psi), epsilon)


@lru_cache(maxsize=4096)
def _final(alpha: float, vartheta: float, n_max: int, convention: str):
    cps = run_protocol(ProtocolParams(alpha, vartheta, n_max, convention))
    return final_two_atom_state(cps), cavity_vacuum_population(cps)


@lru_cache(maxsize=None)
def marginal_visibility(alpha: float, n_max: int, epsilon: float, convention: str) -> float:
    """Visibility of P(S=0) over vartheta at fixed alpha, from the simulation."""
    thetas = 2 * np.pi * np.arange(VISIBILITY_SAMPLES) / VISIBILITY_SAMPLES
    curve = []
    for t in thetas:
        psi, _ = _final(alpha, float(t), n_max, convention)
        curve.append(joint_distribution(_noisy(psi, epsilon)).marginal_s()[0])
    return visibility(curve)


def _wave_fidelity(psi, alpha: float, phi: float) -> float:
    if np.sin(alpha) ** 2 < EMPTY_BRANCH:
        return float("nan")
    return fidelity_up_to_global_phase(branch_state(psi, WAVE), wave_state(phi))


def _checked(probs: np.ndarray, where: str) -> np.ndarray:
    if abs(probs.sum() - 1) > SUM_TOL:
        raise NumericalInvariantError(f"{where}: probabilities sum to {probs.sum()!r}")
    return probs


def sweep_record(alpha: float, vartheta: float, n_max: int = 2, epsilon: float = 0.0,
                 convention: str = dynamics.HAMILTONIAN) -> dict:
    psi, vacuum = _final(alpha, vartheta, n_max, convention)
    rho = _noisy(psi, epsilon)
    probs = _checked(joint_distribution(rho).as_array(), f"alpha={alpha!r}, vartheta={vartheta!r}")
    phi = reference_mapping(n_max, convention).predict(vartheta)
    return dict(zip(SWEEP_COLUMNS, (
        alpha, vartheta, *probs,
        marginal_visibility(alpha, n_max, epsilon, convention),
        concurrence(rho),
        vacuum,
        _wave_fidelity(psi, alpha, phi),
    )))


def compare_record(alpha: float, vartheta: float, n_max: int = 2,
                   convention: str = dynamics.HAMILTONIAN) -> dict:
    psi, _ = _final(alpha, vartheta, n_max, convention)
    phi = reference_mapping(n_max, convention).predict(vartheta)
    sim = _checked(joint_distribution(psi).as_array(), f"alpha={alpha!r}, vartheta={vartheta!r}")
    ideal = ideal_joint_distribution(IdealParams(alpha, phi)).as_array()
    return dict(zip(COMPARE_COLUMNS, (
        alpha, vartheta, phi, _wave_fidelity(psi, alpha, phi),
        float(np.max(np.abs(sim - ideal))),
    )))


def checkpoint_records(alpha: float, vartheta: float, n_max: int = 2,
                       convention: str = dynamics.HAMILTONIAN) -> list[dict]:
    records = []
    params = ProtocolParams(alpha, vartheta, n_max, convention)
    for cp in run_protocol(params):
        fid = fidelity_up_to_global_phase(cp.state, displayed_state(cp.label, params.alpha,
                                                                    vartheta, n_max))
        settings = json.dumps(cp.settings, sort_keys=True)
        for idx, (label, amp) in enumerate(zip(basis_labels(cp.state.dims), cp.state.amplitudes)):
            records.append(dict(zip(CHECKPOINT_COLUMNS, (
                cp.label, idx, label, float(amp.real), float(amp.imag), fid, settings))))
    return records


def fit_record(grid: tuple[float, float, int], alpha: float, n_max: int = 2,
               convention: str = dynamics.HAMILTONIAN) -> dict:
    mapping = fit_phase_mapping(np.linspace(*grid), alpha, n_max, convention)
    return dict(zip(FIT_COLUMNS, (
        alpha, grid[2], mapping.slope, mapping.offset, mapping.residual, mapping.is_affine,
        PAPER_SLOPE, PAPER_OFFSET, mapping.slope - PAPER_SLOPE, mapping.offset - PAPER_OFFSET,
    )))


# --- output ------------------------------------------------------------------

def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".16e")
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) else value
    if isinstance(value, np.integer):
        return int(value)
    return value


def render(records: Iterable[dict], columns: tuple[str, ...], fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for rec in records:
            writer.writerow([_csv_cell(rec[c]) for c in columns])
    else:
        for rec in records:
            buf.write(json.dumps({c: _json_value(rec[c]) for c in columns}, allow_nan=False))
            buf.write("\n")
    return buf.getvalue()


def build_records(config: RunConfig) -> tuple[list[dict], tuple[str, ...]]:
    conv, n_max = config.convention, config.n_max
    if config.mode in ("simulate", "sweep"):
        records = [sweep_record(a, t, n_max, config.epsilon, conv)
                   for a in config.alphas() for t in config.varthetas()]
        return records, SWEEP_COLUMNS
    if config.mode == "compare":
        records = [compare_record(a, t, n_max, conv)
                   for a in config.alphas() for t in config.varthetas()]
        return records, COMPARE_COLUMNS
    if config.mode == "checkpoints":
        return checkpoint_records(config.alpha, config.vartheta, n_max, conv), CHECKPOINT_COLUMNS
    alpha = MAPPING_ALPHA if config.alpha is None else config.alpha
    return [fit_record(config.vartheta_grid, alpha, n_max, conv)], FIT_COLUMNS


def run(config: RunConfig, stdout=None) -> int:
    for a in config.alphas():
        if not 0 <= a <= np.pi / 2:
            log.warning("alpha=%r lies outside [0, pi/2]", a)
    records, columns = build_records(config)
    text = render(records, columns, config.output_format)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        (stdout or sys.stdout).write(text)
    return 0


def _error_record(kind: str, message: str, errors: list[str] | None = None) -> str:
    return json.dumps({"status": "error", "kind": kind, "message": message,
                       "errors": errors or [message]})


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors (exit 1), not argparse's default 2
    def error(self, message):
        raise ConfigError([f"command line: {message}"])


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qdce", description=__doc__.split("\n")[0])
    ap.add_argument("mode", nargs="?", choices=MODES)
    ap.add_argument("--mode", dest="mode_flag", choices=MODES)
    ap.add_argument("--config", metavar="PATH")
    ap.add_argument("--alpha")
    ap.add_argument("--alpha-grid", metavar="A:B:N")
    ap.add_argument("--vartheta")
    ap.add_argument("--vartheta-grid", metavar="A:B:N")
    ap.add_argument("--n-max")
    ap.add_argument("--epsilon")
    ap.add_argument("--convention", choices=("hamiltonian", "paper-eq7", "paper_eq7"))
    ap.add_argument("--format", dest="output_format", choices=FORMATS)
    ap.add_argument("--out", dest="output_path", metavar="PATH")
    return ap


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        sys.stderr.write(_error_record("config", "invalid command line", exc.errors) + "\n")
        return 1
    if args.mode and args.mode_flag and args.mode != args.mode_flag:
        sys.stderr.write(_error_record("config", "conflicting modes") + "\n")
        return 1
    text, source = "", "config"
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            sys.stderr.write(_error_record("config", str(exc)) + "\n")
            return 1
        source = args.config
    overrides = {
        "mode": args.mode or args.mode_flag,
        "alpha": args.alpha, "alpha-grid": args.alpha_grid,
        "vartheta": args.vartheta, "vartheta-grid": args.vartheta_grid,
        "n-max": args.n_max, "epsilon": args.epsilon, "convention": args.convention,
        "format": args.output_format, "out": args.output_path,
    }
    try:
        config = parse_config(text, overrides, source)
        return run(config)
    except ConfigError as exc:
        sys.stderr.write(_error_record("config", "invalid configuration", exc.errors) + "\n")
        return 1
    except NumericalInvariantError as exc:
        sys.stderr.write(_error_record(type(exc).__name__, str(exc)) + "\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(_error_record(type(exc).__name__, str(exc)) + "\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
