"""Command-line scans over the interatomic distance.

    ncdipole --preset hydrogen --rmin 20e-9 --rmax 200e-9 --rpoints 500 \
             --displacement --out hydrogen_scan.csv
    ncdipole shapes --vmin 1 --vmax 10 --points 200 --out shapes.csv

Exit codes: 0 success, 1 configuration error, 2 numerical non-convergence
(partial output written, failing rows flagged).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .core import Atom, InvalidInputError, TwoAtomSystem, detuned, hydrogen_preset, with_separation
from .forces import (
    Tier,
    force_sample,
    full_dissimilar_terms,
    full_identical_terms,
)
from .kinematics import Convention, displacement, shape_A, shape_B
from .quadrature import NonConvergenceError

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGENCE = 0, 1, 2
HEADER_TAG = "# ncdipole scan"

TIERS = {
    "leading": Tier.LEADING_CLOSED,
    "full-identical": Tier.FULL_IDENTICAL,
    "full-dissimilar": Tier.FULL_DISSIMILAR,
}

BASE_COLUMNS = (
    ["R_m", "v"]
    + [f"F_{a}_{c}" for a in ("A", "B", "net") for c in "xyz"]
    + ["F_A_par", "F_A_perp_mag", "F_B_par", "F_B_perp_mag"]
)
DISPLACEMENT_COLUMNS = [f"S_{a}_{c}" for a in ("A", "B") for c in "xyz"]
TERM_COLUMNS = ["R_m", "v", "atom", "term", "F_x", "F_y", "F_z"]


class ConfigError(Exception):
    def __init__(self, message, line=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"field '{key}'")
        super().__init__(": ".join(where + [message]) if where else message)


@dataclass
class ScanConfig:
    preset: str = "hydrogen"
    tier: str = "leading"
    rmin: float = 20e-9
    rmax: float = 200e-9
    rpoints: int = 500
    tobs: str = "0"
    detuning_ratio: float = 0.0
    displacement: bool = False
    convention: str = "truncate"
    diagnostic: bool = False
    format: str = "csv"
    out: str | None = None
    workers: int = 1
    # custom preset
    omega_A: float | None = None
    gamma_A: float | None = None
    mass_A: float | None = None
    dipoles_A: str | None = None
    omega_B: float | None = None
    gamma_B: float | None = None
    mass_B: float | None = None
    dipoles_B: str | None = None
    axis: str = "0,0,-1"


_FIELD_TYPES = {f.name: f.type for f in fields(ScanConfig)}
# Options that do not change the data and are left out of the emitted header.
_NOT_IN_HEADER = {"out", "workers"}


def _coerce(key, raw, line=None):
    if key not in _FIELD_TYPES:
        raise ConfigError("unknown key", line, key)
    kind = _FIELD_TYPES[key]
    if raw is None:
        return None
    if isinstance(raw, str):
        raw = raw.strip()
    try:
        if kind == "bool":
            if isinstance(raw, bool):
                return raw
            low = str(raw).lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "int":
            return int(raw)
        if "float" in kind:
            return None if raw in ("", "none") else float(raw)
        return None if raw in ("none",) and "None" in kind else str(raw)
    except ValueError:
        raise ConfigError(f"cannot parse {raw!r}", line, key) from None


def read_config(path) -> dict:
    """Parse ``key = value`` lines, or the header of an emitted scan file."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return {k: _coerce(k, v) for k, v in json.loads(text)["config"].items()}
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ConfigError(f"bad JSON config: {exc}") from None
    emitted = stripped.startswith(HEADER_TAG)
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if emitted:
            if not s.startswith("#"):
                break
            s = s[1:].strip()
            if "=" not in s:
                continue
        elif s.startswith("#"):
            continue
        if "=" not in s:
            raise ConfigError("expected 'key = value'", lineno)
        key, _, raw = s.partition("=")
        key = key.strip().replace("-", "_")
        values[key] = _coerce(key, raw, lineno)
    return values


def _vec(text, key):
    try:
        v = np.array([float(x) for x in text.split(",")])
    except (AttributeError, ValueError):
        raise ConfigError(f"expected 'x,y,z', got {text!r}", key=key) from None
    if v.shape != (3,):
        raise ConfigError("expected three components", key=key)
    return v


def validate(cfg: ScanConfig) -> ScanConfig:
    if cfg.preset not in ("hydrogen", "custom"):
        raise ConfigError("must be 'hydrogen' or 'custom'", key="preset")
    if cfg.tier not in TIERS:
        raise ConfigError(f"must be one of {sorted(TIERS)}", key="tier")
    if not (math.isfinite(cfg.rmin) and cfg.rmin > 0):
        raise ConfigError("must be positive", key="rmin")
    if not (math.isfinite(cfg.rmax) and cfg.rmin < cfg.rmax):
        raise ConfigError("rmin must be smaller than rmax", key="rmax")
    if cfg.rpoints < 2:
        raise ConfigError("need at least 2 points", key="rpoints")
    if cfg.tobs != "lifetime":
        try:
            t = float(cfg.tobs)
        except ValueError:
            raise ConfigError("must be seconds or 'lifetime'", key="tobs") from None
        if not (math.isfinite(t) and t >= 0):
            raise ConfigError("must be non-negative", key="tobs")
    if cfg.convention not in {c.value for c in Convention}:
        raise ConfigError("must be 'truncate' or 'full-decay'", key="convention")
    if cfg.format not in ("csv", "json"):
        raise ConfigError("must be 'csv' or 'json'", key="format")
    if cfg.tier == "full-dissimilar" and cfg.detuning_ratio == 0:
        raise ConfigError("full-dissimilar needs a nonzero detuning_ratio", key="detuning_ratio")
    if cfg.tier != "full-dissimilar" and cfg.detuning_ratio != 0:
        raise ConfigError(f"tier {cfg.tier} needs identical atoms", key="detuning_ratio")
    if cfg.diagnostic and cfg.tier == "leading":
        raise ConfigError("term breakdown needs a full tier", key="diagnostic")
    if cfg.workers < 1:
        raise ConfigError("must be >= 1", key="workers")
    if cfg.out is None:
        raise ConfigError("an output path is required", key="out")
    if cfg.preset == "custom":
        for side in "AB":
            for name in ("omega", "gamma", "mass", "dipoles"):
                if getattr(cfg, f"{name}_{side}") is None:
                    raise ConfigError("required by the custom preset", key=f"{name}_{side}")
    return cfg


def build_system(cfg: ScanConfig) -> TwoAtomSystem:
    if cfg.preset == "hydrogen":
        base = hydrogen_preset(cfg.rmin)
    else:
        try:
            atoms = []
            for side in "AB":
                dips = [_vec(d, f"dipoles_{side}")
                        for d in getattr(cfg, f"dipoles_{side}").split(";") if d.strip()]
                atoms.append(Atom(getattr(cfg, f"omega_{side}"), getattr(cfg, f"gamma_{side}"),
                                  getattr(cfg, f"mass_{side}"), tuple(dips)))
            axis = _vec(cfg.axis, "axis")
            base = TwoAtomSystem(atoms[0], atoms[1], axis / np.linalg.norm(axis) * cfg.rmin)
        except InvalidInputError as exc:
            raise ConfigError(str(exc), key="custom") from None
        if cfg.tier != "full-dissimilar" and not base.is_identical:
            raise ConfigError("atoms differ; use tier full-dissimilar", key="tier")
    if cfg.tier == "full-dissimilar" and base.is_identical:
        base = detuned(base, cfg.detuning_ratio * base.atomA.gamma)
    return base


def _fmt(x):
    return "" if x is None else f"{x + 0.0:.17g}"


def _header_items(cfg: ScanConfig):
    items = []
    for f in fields(ScanConfig):
        if f.name in _NOT_IN_HEADER:
            continue
        val = getattr(cfg, f.name)
        if val is None:
            continue
        if isinstance(val, bool):
            val = "true" if val else "false"
        elif isinstance(val, float):
            val = repr(val)
        items.append((f.name, str(val)))
    return items


def _compute_row(cfg: ScanConfig, base: TwoAtomSystem, R: float):
    system = with_separation(base, R)
    T = 1 / system.atomA.gamma if cfg.tobs == "lifetime" else float(cfg.tobs)
    values = [R, system.v]
    terms = []
    status = "ok" if system.perturbative else "nonperturbative"
    try:
        sample = force_sample(system, T, TIERS[cfg.tier])
        values += list(sample.F_A) + list(sample.F_B) + list(sample.F_net)
        values += [sample.F_A_par, float(np.linalg.norm(sample.F_A_perp)),
                   sample.F_B_par, float(np.linalg.norm(sample.F_B_perp))]
        if cfg.diagnostic:
            breakdown = full_dissimilar_terms if cfg.tier == "full-dissimilar" else full_identical_terms
            for atom in "AB":
                for label, vec in breakdown(system, T, atom).items():
                    terms.append([R, system.v, atom, label, *vec])
    except NonConvergenceError:
        values += [None] * (len(BASE_COLUMNS) - 2)
        status = "nonconvergence"
    if cfg.displacement:
        if system.is_identical:
            values += list(displacement(system, None, "A", cfg.convention))
            values += list(displacement(system, None, "B", cfg.convention))
        else:
            values += [None] * 6
    return values, terms, status


def run_scan(cfg: ScanConfig) -> int:
    """Run the scan described by ``cfg``, write the output file, return the exit code."""
    validate(cfg)
    base = build_system(cfg)
    grid = np.linspace(cfg.rmin, cfg.rmax, cfg.rpoints)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(lambda R: _compute_row(cfg, base, R), grid))
        # pool.map keeps grid order, so output is independent of worker count.
    else:
        results = [_compute_row(cfg, base, R) for R in grid]

    columns = BASE_COLUMNS + (DISPLACEMENT_COLUMNS if cfg.displacement else []) + ["status"]
    out = Path(cfg.out)
    if cfg.format == "csv":
        lines = [HEADER_TAG] + [f"# {k} = {v}" for k, v in _header_items(cfg)]
        lines.append(",".join(columns))
        for values, _, status in results:
            lines.append(",".join([_fmt(x) for x in values] + [status]))
        out.write_text("\n".join(lines) + "\n")
    else:
        doc = {
            "config": dict(_header_items(cfg)),
            "columns": columns,
            "rows": [[None if x is None else float(x) for x in values] + [status]
                     for values, _, status in results],
        }
        out.write_text(json.dumps(doc, indent=1) + "\n")

    if cfg.diagnostic:
        term_path = out.with_name(out.stem + ".terms.csv")
        lines = [",".join(TERM_COLUMNS)]
        for _, terms, _ in results:
            for R, v, atom, label, fx, fy, fz in terms:
                lines.append(",".join([_fmt(R), _fmt(v), atom, label, _fmt(fx), _fmt(fy), _fmt(fz)]))
        term_path.write_text("\n".join(lines) + "\n")

    failed = any(status == "nonconvergence" for _, _, status in results)
    return EXIT_NONCONVERGENCE if failed else EXIT_OK


def emit_reference_shapes(v_grid, output_path) -> Path:
    """Write v, f_A(v), f_B(v) for plotting and regression baselines."""
    v = np.asarray(v_grid, dtype=float)
    if v.size == 0 or v.min() < 1 or v.max() > 100:
        raise InvalidInputError("v grid must lie within [1, 100]")
    lines = ["v,f_A,f_B"]
    lines += [f"{x:.17g},{a:.17g},{b:.17g}" for x, a, b in zip(v, shape_A(v), shape_B(v))]
    path = Path(output_path)
    path.write_text("\n".join(lines) + "\n")
    return path


def _scan_parser():
    p = argparse.ArgumentParser(prog="ncdipole", description="Scan nonconservative dipole forces over R.")
    p.add_argument("--config", help="key = value file, or a previous scan output")
    p.add_argument("--preset", choices=["hydrogen", "custom"])
    p.add_argument("--tier", choices=sorted(TIERS))
    p.add_argument("--rmin", type=float)
    p.add_argument("--rmax", type=float)
    p.add_argument("--rpoints", type=int)
    p.add_argument("--tobs", help="observation time in seconds, or 'lifetime'")
    p.add_argument("--detuning-ratio", dest="detuning_ratio", type=float)
    p.add_argument("--displacement", action="store_const", const=True)
    p.add_argument("--convention", choices=[c.value for c in Convention])
    p.add_argument("--diagnostic", action="store_const", const=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--workers", type=int)
    return p


def _shapes_parser():
    p = argparse.ArgumentParser(prog="ncdipole shapes", description="Write the displacement shape functions.")
    p.add_argument("--vmin", type=float, default=1.0)
    p.add_argument("--vmax", type=float, default=10.0)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", required=True)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "shapes":
        args = _shapes_parser().parse_args(argv[1:])
        try:
            emit_reference_shapes(np.linspace(args.vmin, args.vmax, args.points), args.out)
        except (InvalidInputError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK
    if argv and argv[0] == "scan":
        argv = argv[1:]
    args = _scan_parser().parse_args(argv)
    try:
        values = read_config(args.config) if args.config else {}
        for key, val in vars(args).items():
            if key != "config" and val is not None:
                values[key] = _coerce(key, val)
        cfg = ScanConfig(**values)
        return run_scan(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
