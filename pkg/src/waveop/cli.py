"""Command-line front end.

    waveop verify   [--seed N]
    waveop spectrum [model flags] [--l L] [--l-max L]
    waveop compare  [model flags] [--l L] [--delta-sweep d1,d2,...]
    waveop bands    [model flags] --l-max L

Output is CSV (header row, ``.17g`` reals) or JSON of the form
``{"config": {...}, "rows": [...], "checks": [...]}``.  Exit status is 0 on
success, 1 when a verification check fails, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from waveop import checks as suites
from waveop.core import DegenerateSpectrum, WaveOperator, build_f_operator, eigenvalue_residual, energy_expansion
from waveop.deep import MIN_PROBLEM_DIM, PADDING, DeepPotentialModel, assemble_problem, band_spectrum, rotational_band_report
from waveop.oracle import diagonalize_symmetric, track_states

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

SPECTRUM_COLUMNS = ("l", "n_r", "m", "C2", "E0_coeff", "E1_coeff", "E2_coeff", "E3_coeff", "E_over_V0_at_delta")
COMPARE_COLUMNS = (
    "delta", "state", "E_exact", "E_order1", "E_order2", "E_order3", "abs_err_order3", "residual_norm",
)
BANDS_COLUMNS = (
    "n_r", "rotational_coeff", "m2_coeff", "fit_residual", "cubic_m3", "cubic_c2m", "cubic_m", "cubic_residual",
)
CHECK_COLUMNS = ("name", "measured", "comparison", "tolerance", "passed")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    v0: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0
    mu: float = 1.0
    hbar: float = 1.0
    l: int = 0
    l_max: int | None = None
    dim: int = 40
    states: int = 6
    format: str = "csv"
    out: str | None = None
    seed: int = 42
    delta_sweep: tuple[float, ...] | None = None
    inject_degenerate: bool = False

    def model(self, l: int | None = None) -> DeepPotentialModel:
        return DeepPotentialModel(
            v0=self.v0, alpha=self.alpha, beta=self.beta, mu=self.mu, hbar=self.hbar, l=self.l if l is None else l
        )

    @property
    def l_values(self) -> list[int]:
        return list(range(self.l, (self.l if self.l_max is None else self.l_max) + 1))

    def public(self) -> dict:
        d = asdict(self)
        d.pop("inject_degenerate")
        if d["delta_sweep"] is not None:
            d["delta_sweep"] = list(d["delta_sweep"])
        return d


# configuration -------------------------------------------------------------------

_CASTS = {"v0": float, "alpha": float, "beta": float, "mu": float, "hbar": float, "l": int, "l_max": int,
          "dim": int, "states": int, "format": str, "out": str, "seed": int}


def _parse_sweep(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --delta-sweep value {text!r}") from exc
    if not values:
        raise ConfigError("--delta-sweep needs at least one value")
    return values


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "delta_sweep":
            values[key] = _parse_sweep(value)
            continue
        if key not in _CASTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CASTS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def validate(cfg: RunConfig) -> None:
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    if cfg.command == "verify":
        return
    if cfg.l < 0:
        raise ConfigError("l must be non-negative")
    if cfg.l_max is not None and cfg.l_max < cfg.l:
        raise ConfigError(f"l-max ({cfg.l_max}) is below l ({cfg.l})")
    if cfg.dim < MIN_PROBLEM_DIM:
        raise ConfigError(f"dim must be at least {MIN_PROBLEM_DIM}")
    if not 1 <= cfg.states <= cfg.dim - PADDING:
        raise ConfigError(f"states must be between 1 and dim - {PADDING} = {cfg.dim - PADDING}")
    try:
        for l in cfg.l_values:
            cfg.model(l)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.delta_sweep is not None:
        if cfg.command != "compare":
            raise ConfigError("--delta-sweep only applies to compare")
        if any(not (math.isfinite(d) and d > 0) for d in cfg.delta_sweep):
            raise ConfigError("delta sweep values must be positive")
    if cfg.command == "bands" and len(cfg.l_values) < 2:
        raise ConfigError("bands needs an l range with at least two values (set --l-max above --l)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    for name in ("v0", "alpha", "beta", "mu", "hbar"):
        common.add_argument(f"--{name}", type=float, default=None, help="model parameter (default 1)")
    common.add_argument("--l", type=int, default=None, help="angular momentum, or start of the l range (default 0)")
    common.add_argument("--l-max", dest="l_max", type=int, default=None, help="end of the l range")
    common.add_argument("--dim", type=int, default=None, help="ladder truncation (default 40)")
    common.add_argument("--states", type=int, default=None, help="states per l (default 6)")
    common.add_argument("--format", choices=("csv", "json"), default=None, help="output format (default csv)")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--seed", type=int, default=None, help="random seed (default 42)")
    common.add_argument("--config", default=None, help="flat key=value config file; flags take precedence")

    parser = argparse.ArgumentParser(prog="waveop", description="Wave-operator perturbation theory for deep potentials.")
    sub = parser.add_subparsers(dest="command", required=True)
    verify = sub.add_parser("verify", parents=[common], help="run every verification suite")
    verify.add_argument("--inject-degenerate", action="store_true", help=argparse.SUPPRESS)
    sub.add_parser("spectrum", parents=[common], help="delta-series coefficients of the band spectrum")
    compare = sub.add_parser("compare", parents=[common], help="series vs exact diagonalization")
    compare.add_argument("--delta-sweep", dest="delta_sweep", default=None,
                         help="comma-separated delta values; hbar is derived for each")
    sub.add_parser("bands", parents=[common], help="rotational band fits across an l range")
    return parser


def make_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    merged = {}
    if args.config:
        merged.update(read_config_file(args.config))
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None and value is not False:
            merged[f.name] = value
    if isinstance(merged.get("delta_sweep"), str):
        merged["delta_sweep"] = _parse_sweep(merged["delta_sweep"])
    merged["command"] = args.command
    cfg = RunConfig(**merged)
    validate(cfg)
    return cfg


# commands ------------------------------------------------------------------------


def cmd_verify(cfg: RunConfig) -> tuple[list[dict], list[suites.Check]]:
    results = suites.run_all(cfg.seed)
    if cfg.inject_degenerate:
        try:
            build_f_operator(suites.degenerate_probe())
        except DegenerateSpectrum as exc:
            print(f"DegenerateSpectrum: {exc}", file=sys.stderr)
            results.append(suites.Check(f"degenerate_spectrum_levels_{exc.i}_{exc.j}", exc.gap, ">", exc.tol, False))
    return [], results


def cmd_spectrum(cfg: RunConfig) -> list[dict]:
    rows = []
    for l in cfg.l_values:
        bs = band_spectrum(cfg.model(l), cfg.states, cfg.dim)
        for i, e in enumerate(bs.entries):
            rows.append(dict(zip(SPECTRUM_COLUMNS, (
                l, e.n_r, e.m, bs.c2, e.e0, e.e1, e.e2, e.e3, bs.energy_over_v0(i),
            ))))
    return rows


def compare_rows(model: DeepPotentialModel, states: int, dim: int) -> list[dict]:
    p = assemble_problem(model, dim)
    w = WaveOperator.from_problem(p)
    exp = energy_expansion(p, w.f)
    dec = diagonalize_symmetric(p.hamiltonian())
    idx = track_states(dec.vectors, states)
    rows = []
    for n in range(states):
        exact = float(dec.values[idx[n]])
        orders = [exp.evaluate(n, 1.0, k) for k in (1, 2, 3)]
        rows.append(dict(zip(COMPARE_COLUMNS, (
            model.delta, n, exact, *orders, abs(exact - orders[2]), eigenvalue_residual(p, w, exp, n),
        ))))
    return rows


def cmd_compare(cfg: RunConfig) -> list[dict]:
    base = cfg.model()
    if cfg.delta_sweep is None:
        models = [base]
    else:
        models = [DeepPotentialModel.from_dimensionless(d, base.beta_ratio, base.l, v0=base.v0, alpha=base.alpha, mu=base.mu)
                  for d in cfg.delta_sweep]
    return [row for model in models for row in compare_rows(model, cfg.states, cfg.dim)]


def cmd_bands(cfg: RunConfig) -> list[dict]:
    spectra = [band_spectrum(cfg.model(l), cfg.states, cfg.dim) for l in cfg.l_values]
    report = rotational_band_report(spectra)
    rows = []
    for b in report.bands:
        cubic = b.cubic if b.cubic is not None else (None, None, None)
        rows.append(dict(zip(BANDS_COLUMNS, (
            b.n_r, b.rotational, b.m2_coefficient, b.residual, *cubic, b.cubic_residual,
        ))))
    return rows


# output --------------------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def render(cfg: RunConfig, columns, rows: list[dict], check_list: list[suites.Check]) -> str:
    if cfg.format == "json":
        doc = {"config": cfg.public(), "rows": rows, "checks": [c.as_dict() for c in check_list]}
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if cfg.command == "verify":
        writer.writerow(CHECK_COLUMNS)
        for c in check_list:
            writer.writerow([_cell(v) for v in c.as_dict().values()])
    else:
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def main(argv=None) -> int:
    try:
        cfg = make_config(argv)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    check_list: list[suites.Check] = []
    columns: tuple[str, ...] = ()
    try:
        if cfg.command == "verify":
            rows, check_list = cmd_verify(cfg)
        elif cfg.command == "spectrum":
            rows, columns = cmd_spectrum(cfg), SPECTRUM_COLUMNS
        elif cfg.command == "compare":
            rows, columns = cmd_compare(cfg), COMPARE_COLUMNS
        else:
            rows, columns = cmd_bands(cfg), BANDS_COLUMNS
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL

    text = render(cfg, columns, rows, check_list)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)

    if cfg.command == "verify":
        failed = [c for c in check_list if not c.passed]
        for c in failed:
            print(f"FAILED {c.name}: {c.measured!r} {c.comparison} {c.tolerance!r}", file=sys.stderr)
        return EXIT_FAIL if failed else EXIT_OK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
