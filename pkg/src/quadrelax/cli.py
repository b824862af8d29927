"""Batch command-line front end.

Subcommands: rates, evolve, fit, bloch, ilt, validate.  Physics inputs come
from a flat ``key = value`` config file and/or flags (flags win).  Exit codes:
0 success, 1 computation failure, 2 usage error, 3 malformed data file.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, evolution
from .curves import DataFormatError, DecayCurve, read_curve
from .phys_params import (QuadrupolarConstant, SpectralDensities,
                          lorentzian_spectral_densities, densities_from_fit,
                          quadrupolar_constant_simplified)
from .redfield_core import (CoherenceBlock, assemble_block, evaluate_block,
                            numeric_eigensystem, validate_against_reference_tables)
from .spin_algebra import SpinSystem, make_quadrupole_operators

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3

_CONFIG_KEYS = ("spin", "larmor_freq", "quad_freq", "correlation_time",
                "j0", "j1", "j2", "c_override", "equilibrium", "out")


@dataclass
class RunConfig:
    spin: int = 7
    larmor_freq: float | None = None
    quad_freq: float | None = None
    correlation_time: float | None = None
    j0: float | None = None
    j1: float | None = None
    j2: float | None = None
    c_override: float | None = None
    equilibrium: str = "pure_top"
    out: str = "."

    def densities(self) -> SpectralDensities:
        explicit = all(v is not None for v in (self.j0, self.j1, self.j2))
        from_tau = self.correlation_time is not None
        if explicit and from_tau:
            raise ValueError("give either correlation_time or explicit j0/j1/j2, not both")
        if explicit:
            return SpectralDensities(self.j0, self.j1, self.j2)
        if from_tau:
            if self.larmor_freq is None:
                raise ValueError("correlation_time needs larmor_freq as well")
            return lorentzian_spectral_densities(self.larmor_freq, self.correlation_time)
        raise ValueError("no spectral densities: set correlation_time (+larmor_freq) or j0/j1/j2")

    def constant(self) -> QuadrupolarConstant:
        if self.c_override is not None:
            return QuadrupolarConstant(self.c_override, "user_supplied")
        if self.quad_freq is not None:
            return quadrupolar_constant_simplified(self.quad_freq)
        raise ValueError("no quadrupolar constant: set quad_freq or c_override")

    def equilibrium_state(self) -> evolution.DensityState:
        name = self.equilibrium
        if name == "pure_top":
            return evolution.DensityState.pure_top(self.spin + 1)
        if name == "uniform":
            return evolution.DensityState.uniform(self.spin + 1)
        if name.startswith("file:"):
            return _diagonal_state_from_file(Path(name[5:]), self.spin + 1)
        raise ValueError(f"unknown equilibrium {name!r} (pure_top, uniform, or file:PATH)")


def _diagonal_state_from_file(path: Path, dim: int) -> evolution.DensityState:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for tok in line.replace(",", " ").split():
            try:
                values.append(float(tok))
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from exc
    if len(values) != dim:
        raise DataFormatError(f"{path}: expected {dim} diagonal populations, got {len(values)}")
    diag = np.array(values)
    if abs(diag.sum() - 1.0) > 1e-9:
        raise DataFormatError(f"{path}: populations must sum to 1, got {diag.sum()!r}")
    return evolution.DensityState(np.diag(diag).astype(complex))


def load_config(path: Path) -> RunConfig:
    cfg = RunConfig()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataFormatError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in _CONFIG_KEYS:
            raise DataFormatError(f"{path}:{lineno}: unknown key {key!r}")
        if key in ("equilibrium", "out"):
            setattr(cfg, key, value)
        elif key == "spin":
            cfg.spin = int(value)
        else:
            try:
                setattr(cfg, key, float(value))
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from exc
    return cfg


def _apply_flag_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            setattr(cfg, key, flag)
    if getattr(args, "out", None):
        cfg.out = args.out
    return cfg


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(Path(args.config)) if args.config else RunConfig()
    return _apply_flag_overrides(cfg, args)


# ---------------------------------------------------------------------------
# table emission / parsing (the documented round-trip format)
# ---------------------------------------------------------------------------

def format_number(x: float, raw: bool) -> str:
    if np.isinf(x):
        return "inf"
    return repr(float(x)) if raw else f"{x:.4g}"


def write_table(path: Path, columns: list[str], rows, raw: bool = True) -> None:
    lines = ["# columns: " + " ".join(columns)]
    for row in rows:
        lines.append(" ".join(format_number(v, raw) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_table(path: Path) -> dict[str, np.ndarray]:
    """Parse a table written by write_table back into named columns."""
    columns: list[str] | None = None
    data: list[list[float]] = []
    for raw_line in Path(path).read_text(encoding="utf-8").splitlines():
        if raw_line.startswith("# columns:"):
            columns = raw_line[len("# columns:"):].split()
            continue
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        data.append([float(tok) for tok in line.split()])
    if columns is None:
        raise DataFormatError(f"{path}: missing '# columns:' header")
    arr = np.array(data)
    if arr.size and arr.shape[1] != len(columns):
        raise DataFormatError(f"{path}: row width does not match header")
    return {name: arr[:, i] if arr.size else np.array([]) for i, name in enumerate(columns)}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_rates(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    j = cfg.densities()
    c = cfg.constant()
    quads = make_quadrupole_operators(SpinSystem(cfg.spin))
    orders = range(cfg.spin + 1) if args.q == "all" else [int(args.q)]
    rows = []
    for q in orders:
        es = numeric_eigensystem(assemble_block(q, quads, j), c)
        for p, rate in enumerate(es.rates, start=1):
            rows.append((q, p, rate, 1.0 / rate if rate > 0 else np.inf))
    out = Path(cfg.out) / "rates.txt"
    write_table(out, ["q", "p", "rate_hz", "time_s"], rows, raw=args.raw)
    print(f"wrote {out} ({len(rows)} modes; C = {format_number(c.c, args.raw)} Hz^2)")
    return EXIT_OK


def _parse_elements(spec: str) -> list[tuple[int, int]]:
    pairs = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        bits = part.split(",")
        if len(bits) != 2:
            raise ValueError(f"bad element spec {part!r} (use 'row,col;row,col')")
        pairs.append((int(bits[0]), int(bits[1])))
    if not pairs:
        raise ValueError("no elements requested")
    return pairs


def _cmd_evolve(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    j = cfg.densities()
    c = cfg.constant()
    dim = cfg.spin + 1
    if args.state == "noon":
        rho0 = evolution.DensityState.noon(dim)
    elif args.state == "pure_top":
        rho0 = evolution.DensityState.pure_top(dim)
    elif args.state == "uniform":
        rho0 = evolution.DensityState.uniform(dim)
    elif args.state.startswith("file:"):
        rho0 = _diagonal_state_from_file(Path(args.state[5:]), dim)
    else:
        raise ValueError(f"unknown state {args.state!r}")
    rho_eq = cfg.equilibrium_state()
    times = np.linspace(0.0, args.t_max, args.points)
    elements = _parse_elements(args.elements)
    for row, col in elements:
        if not (1 <= row <= dim and 1 <= col <= dim):
            raise ValueError(f"element ({row},{col}) outside 1..{dim}")
    states = evolution.propagate(rho0, rho_eq, j, c, times)
    columns = ["t_seconds"]
    for row, col in elements:
        columns += [f"re_{row}_{col}", f"im_{row}_{col}"]
    rows = []
    for t, state in zip(times, states):
        row_vals = [t]
        for row, col in elements:
            v = state.element(row, col)
            row_vals += [v.real, v.imag]
        rows.append(row_vals)
    out = Path(cfg.out) / "trajectory.txt"
    write_table(out, columns, rows, raw=True)
    print(f"wrote {out} ({len(times)} times, {len(elements)} elements)")
    return EXIT_OK


def _mode_table(model: evolution.MagnetizationModel) -> list[tuple[int, float, float]]:
    rows = []
    for n, (amp, rate) in enumerate(zip(model.amplitudes, model.rates), start=1):
        rows.append((n, model.scale * amp, 1.0 / rate if rate > 0 else np.inf))
    return rows


def _cmd_fit(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    c = cfg.constant()
    long_curve = read_curve(args.long)
    trans_curve = read_curve(args.trans)
    if args.normalize:
        long_curve = DecayCurve(long_curve.times,
                                long_curve.amplitudes / np.max(np.abs(long_curve.amplitudes)),
                                long_curve.sigmas)
        trans_curve = DecayCurve(trans_curve.times,
                                 trans_curve.amplitudes / np.max(np.abs(trans_curve.amplitudes)),
                                 trans_curve.sigmas)
    init = dict(a1z=args.init_a1z, a2z=args.init_a2z, a1x=args.init_a1x,
                a2x=args.init_a2x, b0=args.init_b0, b1=args.init_b1, b2=args.init_b2)
    result = analysis.fit_redfield_joint(long_curve, trans_curve, c, init,
                                         restarts=args.restarts, seed=args.seed)
    densities = densities_from_fit(result.scales(), c)

    scales = result.scales().as_tuple()
    es0 = numeric_eigensystem(CoherenceBlock(0, evaluate_block(0, scales)))
    es1 = numeric_eigensystem(CoherenceBlock(1, evaluate_block(1, scales)))
    long_model = evolution.build_longitudinal_model(es0, result.params["a1z"], result.params["a2z"])
    trans_model = evolution.build_transverse_model(es1, result.params["a1x"], result.params["a2x"])

    out_dir = Path(cfg.out)
    report = [
        "# quadrelax joint fit report",
        f"converged = {str(result.converged).lower()}",
        f"iterations = {result.iterations}",
        f"residual_norm = {format_number(result.residual_norm, args.raw)}",
        f"seed = {args.seed}",
        f"restarts = {args.restarts}",
    ]
    for name in analysis.PARAM_NAMES:
        report.append(f"{name} = {format_number(result.params[name], args.raw)}"
                      f" +/- {format_number(result.uncertainties[name], args.raw)}")
    report.append(f"c_hz2 = {format_number(c.c, args.raw)}")
    for label, value in zip(("j0", "j1", "j2"), densities.as_tuple()):
        report.append(f"{label}_seconds = {format_number(value, args.raw)}")
    report.append("")
    report.append("[longitudinal_modes]  # amplitudes include the scale a1z")
    report.append("# columns: n amplitude time_seconds")
    for row in _mode_table(long_model):
        report.append(" ".join(format_number(v, args.raw) for v in row))
    report.append("")
    report.append("[transverse_modes]  # amplitudes include the scale a1x")
    report.append("# columns: n amplitude time_seconds")
    for row in _mode_table(trans_model):
        report.append(" ".join(format_number(v, args.raw) for v in row))
    report_path = out_dir / "fit_report.txt"
    report_path.write_text("\n".join(report) + "\n", encoding="utf-8")

    for label, curve, model in (("longitudinal", long_curve, long_model),
                                ("transverse", trans_curve, trans_model)):
        dense = np.linspace(curve.times[0], curve.times[-1], 500)
        write_table(out_dir / f"fit_{label}_model.txt", ["t_seconds", "model"],
                    np.column_stack([dense, model.evaluate(dense)]))
        write_table(out_dir / f"fit_{label}_data.txt", ["t_seconds", "data", "model", "residual"],
                    np.column_stack([curve.times, curve.amplitudes, model.evaluate(curve.times),
                                     curve.amplitudes - model.evaluate(curve.times)]))
    print(f"wrote {report_path} (residual_norm = {format_number(result.residual_norm, args.raw)})")
    print(f"B = ({format_number(result.params['b0'], args.raw)}, "
          f"{format_number(result.params['b1'], args.raw)}, "
          f"{format_number(result.params['b2'], args.raw)}) Hz")
    return EXIT_OK


def _cmd_bloch(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    if not args.long and not args.trans:
        raise ValueError("bloch needs --long and/or --trans")
    lines = ["# quadrelax Bloch mono-exponential report"]
    if args.long:
        fit = analysis.fit_bloch_longitudinal(read_curve(args.long))
        lines += [f"longitudinal_converged = {str(fit.converged).lower()}",
                  f"a0z = {format_number(fit.a0, args.raw)} +/- {format_number(fit.uncertainties[0], args.raw)}",
                  f"a1z = {format_number(fit.a1, args.raw)} +/- {format_number(fit.uncertainties[1], args.raw)}",
                  f"t1_seconds = {format_number(fit.t1, args.raw)} +/- {format_number(fit.uncertainties[2], args.raw)}"]
    if args.trans:
        fit = analysis.fit_bloch_transverse(read_curve(args.trans))
        lines += [f"transverse_converged = {str(fit.converged).lower()}",
                  f"a1x = {format_number(fit.a1, args.raw)} +/- {format_number(fit.uncertainties[0], args.raw)}",
                  f"t2_seconds = {format_number(fit.t2, args.raw)} +/- {format_number(fit.uncertainties[1], args.raw)}"]
    out = Path(cfg.out) / "bloch_report.txt"
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_ilt(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    curve = read_curve(args.curve)
    dist = analysis.ilt(curve, (args.t_min, args.t_max, args.points), args.alpha,
                        kernel=args.kernel)
    out = Path(cfg.out) / "distribution.txt"
    write_table(out, ["time_seconds", "weight"],
                np.column_stack([dist.grid, dist.weights]))
    print(f"wrote {out} (alpha = {format_number(dist.alpha, args.raw)}, "
          f"residual = {format_number(dist.residual, args.raw)}, "
          f"condition = {format_number(dist.condition, args.raw)})")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    try:
        j = cfg.densities()
    except ValueError:
        rng = np.random.default_rng(args.seed)
        j0 = rng.uniform(1.0, 10.0)
        j1 = rng.uniform(0.2, j0)
        j2 = rng.uniform(0.1, j1)
        j = SpectralDensities(j0, j1, j2)
        print(f"no densities configured; using seeded random triple "
              f"({j.j0:.6g}, {j.j1:.6g}, {j.j2:.6g})")
    report = validate_against_reference_tables(j)
    lines = [
        "# quadrelax reference-table conformance report",
        f"j0 = {j.j0!r}",
        f"j1 = {j.j1!r}",
        f"j2 = {j.j2!r}",
        f"q0_max_rel = {report.q0_max_rel!r}",
        f"q1_max_rel = {report.q1_max_rel!r}",
    ]
    for q, dev in report.spectra_max_rel:
        lines.append(f"q{q}_spectrum_max_rel = {dev!r}")
    lines.append(f"printed_variant_max_abs = {report.printed_variant_max_abs!r}"
                 "  # five as-published q=1 row-6 cells, see README")
    out = Path(cfg.out) / "validate_report.txt"
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    ok = report.max_relative_deviation < 1e-10
    print(f"max relative deviation {'<' if ok else '>='} 1e-10 "
          f"({report.max_relative_deviation:.3e}); wrote {out}")
    return EXIT_OK if ok else EXIT_COMPUTE


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadrelax",
        description="Spin-7/2 quadrupolar relaxation: rates, trajectories, fits")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--out", help="output directory (default '.')")
        p.add_argument("--seed", type=int, default=0, help="deterministic seed")
        p.add_argument("--raw", action="store_true", help="full-precision numbers in reports")
        p.add_argument("--spin", type=int, dest="spin", help="two times the spin (default 7)")
        p.add_argument("--larmor-freq", type=float, dest="larmor_freq", help="Hz")
        p.add_argument("--quad-freq", type=float, dest="quad_freq", help="Hz")
        p.add_argument("--tau-c", type=float, dest="correlation_time", help="seconds")
        p.add_argument("--j0", type=float, dest="j0", help="seconds")
        p.add_argument("--j1", type=float, dest="j1", help="seconds")
        p.add_argument("--j2", type=float, dest="j2", help="seconds")
        p.add_argument("--c", type=float, dest="c_override", help="Hz^2")
        p.add_argument("--equilibrium", dest="equilibrium",
                       help="pure_top | uniform | file:PATH")

    p = sub.add_parser("rates", help="per-order relaxation rate table")
    common(p)
    p.add_argument("--q", default="all", help="coherence order or 'all'")
    p.set_defaults(func=_cmd_rates)

    p = sub.add_parser("evolve", help="density-matrix element trajectory")
    common(p)
    p.add_argument("--state", default="noon", help="noon | pure_top | uniform | file:PATH")
    p.add_argument("--t-max", type=float, required=True, dest="t_max", help="seconds")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--elements", default="1,1;8,8;8,1",
                   help="semicolon-separated one-based 'row,col' pairs")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("fit", help="joint seven-parameter fit of both curves")
    common(p)
    p.add_argument("--long", required=True, help="longitudinal curve CSV")
    p.add_argument("--trans", required=True, help="transverse curve CSV")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--normalize", action="store_true",
                   help="max-abs normalize both curves before fitting")
    p.add_argument("--init-a1z", type=float, default=0.03)
    p.add_argument("--init-a2z", type=float, default=1.0)
    p.add_argument("--init-a1x", type=float, default=0.03)
    p.add_argument("--init-a2x", type=float, default=1.0)
    p.add_argument("--init-b0", type=float, default=100.0)
    p.add_argument("--init-b1", type=float, default=5.0)
    p.add_argument("--init-b2", type=float, default=0.3)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("bloch", help="mono-exponential T1/T2 baselines")
    common(p)
    p.add_argument("--long", help="longitudinal curve CSV")
    p.add_argument("--trans", help="transverse curve CSV")
    p.set_defaults(func=_cmd_bloch)

    p = sub.add_parser("ilt", help="regularized relaxation-time distribution")
    common(p)
    p.add_argument("--curve", required=True, help="curve CSV")
    p.add_argument("--t-min", type=float, required=True, dest="t_min", help="seconds")
    p.add_argument("--t-max", type=float, required=True, dest="t_max", help="seconds")
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--alpha", type=float, default=None,
                   help="Tikhonov weight (default: discrepancy principle)")
    p.add_argument("--kernel", choices=("decay", "recovery"), default="decay")
    p.set_defaults(func=_cmd_ilt)

    p = sub.add_parser("validate", help="reference-table conformance check")
    common(p)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = getattr(args, "out", None)
        if out:
            Path(out).mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # computation failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
