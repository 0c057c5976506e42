"""Command-line front end.

Exit codes: 0 pass, 1 numerical breach, 2 usage or data error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Sequence, TextIO

from . import dynamics, lii, measures, stateio
from .measures import OptimizerConfig
from .qmat import InvalidStateError, PureState, haar_random_pure_batch

EXIT_OK = 0
EXIT_BREACH = 1
EXIT_USAGE = 2

VERIFY_HEADER = ["trial", "identity", "lhs", "rhs", "residual", "route"]
ESD_HEADER = ["p", "eof_ab", "avg_lii_ab", "balance_sum", "concurrence_ab", "eab2_residual"]


class ConfigError(ValueError):
    pass


def fmt(x: float) -> str:
    """12 significant digits, locale independent; -0 prints as 0."""
    return f"{float(x) + 0.0:.12g}"


@dataclass
class RunConfig:
    subcommand: str
    seed: int = 42
    trials: int = 50
    dims: tuple[int, ...] = (2, 2, 2)
    alpha_sq: float = dynamics.DEFAULT_ALPHA_SQ
    steps: int = 101
    tolerance: float | None = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    output_path: str = "-"
    input_path: str | None = None
    measured: int = 1

    def validate(self) -> None:
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigError("--tol must be positive")
        if self.subcommand == "verify":
            if self.trials <= 0:
                raise ConfigError("no trials: --trials must be at least 1")
            if len(self.dims) != 3:
                raise ConfigError(f"--dims must describe three parties, got {list(self.dims)}")
        elif self.subcommand == "esd":
            if not 0.0 < self.alpha_sq < 1.0:
                raise ConfigError("--alpha-sq must lie strictly between 0 and 1")
            if self.steps < 2:
                raise ConfigError("--steps must be at least 2")
        elif self.subcommand == "measure":
            if not self.input_path:
                raise ConfigError("measure needs --state")
        else:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")

    @property
    def tol(self) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return 5e-3 if self.subcommand == "esd" else lii.DEFAULT_TOLERANCE


@contextmanager
def _output(path: str, stdout: TextIO) -> Iterator[TextIO]:
    if path == "-":
        yield stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}") from None
    if any(d < 2 for d in dims):
        raise argparse.ArgumentTypeError("dimensions must be >= 2")
    return dims


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liiflow",
        description="Quantum discord, entanglement of formation and LII identity checks.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def optimizer_flags(p):
        p.add_argument("--grid-theta", type=int, default=60)
        p.add_argument("--grid-phi", type=int, default=120)

    p = sub.add_parser("verify", help="check every LII identity on random pure states")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dims", type=_dims, default=(2, 2, 2))
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default="-")
    p.add_argument("--state", default=None, help="use this pure state for every trial")
    optimizer_flags(p)

    p = sub.add_parser("esd", help="entanglement sudden death sweep")
    p.add_argument("--alpha-sq", type=float, default=dynamics.DEFAULT_ALPHA_SQ)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default="-")
    optimizer_flags(p)

    p = sub.add_parser("measure", help="correlation report for one bipartite state")
    p.add_argument("--state", required=True)
    p.add_argument("--measured", type=int, default=1)
    optimizer_flags(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    opt = OptimizerConfig(grid_theta=args.grid_theta, grid_phi=args.grid_phi)
    cfg = RunConfig(subcommand=args.subcommand, optimizer=opt)
    for name, attr in [
        ("trials", "trials"),
        ("seed", "seed"),
        ("dims", "dims"),
        ("alpha_sq", "alpha_sq"),
        ("steps", "steps"),
        ("tol", "tolerance"),
        ("out", "output_path"),
        ("state", "input_path"),
        ("measured", "measured"),
    ]:
        if hasattr(args, name):
            setattr(cfg, attr, getattr(args, name))
    cfg.validate()
    return cfg


def _verify_states(cfg: RunConfig) -> list[PureState]:
    if cfg.input_path:
        state = stateio.load(cfg.input_path)
        if not isinstance(state, PureState):
            raise ConfigError("verify --state needs a pure state file")
        if len(state.dims) != 3:
            raise ConfigError(f"verify --state needs a tripartite state, got {list(state.dims)}")
        return [state] * cfg.trials
    return haar_random_pure_batch(cfg.dims, cfg.trials, cfg.seed)


def cmd_verify(cfg: RunConfig, stdout: TextIO = sys.stdout, stderr: TextIO = sys.stderr) -> int:
    states = _verify_states(cfg)
    reports = [lii.identity_residuals(psi, cfg=cfg.optimizer) for psi in states]
    with _output(cfg.output_path, stdout) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(VERIFY_HEADER)
        for trial, rep in enumerate(reports):
            for e in rep.entries:
                writer.writerow([trial, e.name, fmt(e.lhs), fmt(e.rhs), fmt(e.residual), e.route])
    trial, worst = lii.max_residual(reports)
    if worst.residual > cfg.tol:
        print(
            f"FAIL: trial {trial} identity {worst.name} residual {fmt(worst.residual)} "
            f"> tol {fmt(cfg.tol)} (lhs={fmt(worst.lhs)}, rhs={fmt(worst.rhs)})",
            file=stderr,
        )
        return EXIT_BREACH
    print(f"ok: max residual {fmt(worst.residual)} ({worst.name}, trial {trial})", file=stderr)
    return EXIT_OK


def cmd_esd(cfg: RunConfig, stdout: TextIO = sys.stdout, stderr: TextIO = sys.stderr) -> int:
    amps = dynamics.InitialAmplitudes.from_alpha_sq(cfg.alpha_sq)
    records = dynamics.esd_sweep(amps, dynamics.default_grid(cfg.steps), cfg.optimizer)
    with _output(cfg.output_path, stdout) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ESD_HEADER)
        for r in records:
            writer.writerow(
                [fmt(r.p), fmt(r.eof_ab), fmt(r.avg_lii_ab), fmt(r.balance_sum),
                 fmt(r.concurrence_ab), fmt(r.eab2_residual)]
            )
    worst = max(records, key=lambda r: r.eab2_residual)
    if worst.eab2_residual > cfg.tol:
        print(
            f"FAIL: p={fmt(worst.p)} eab2 residual {fmt(worst.eab2_residual)} > tol {fmt(cfg.tol)}",
            file=stderr,
        )
        return EXIT_BREACH
    return EXIT_OK


def cmd_measure(cfg: RunConfig, stdout: TextIO = sys.stdout, stderr: TextIO = sys.stderr) -> int:
    rho = stateio.as_density(stateio.load(cfg.input_path))
    if rho.n_parties != 2:
        raise ConfigError(f"measure needs a bipartite state, got dims {list(rho.dims)}")
    if cfg.measured not in (0, 1):
        raise ConfigError("--measured must be 0 or 1")
    report = measures.correlation_report(rho, cfg.measured, cfg.optimizer)
    for key, value in report.items():
        print(f"{key}={fmt(value)}", file=stdout)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "esd": cmd_esd, "measure": cmd_measure}


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None,
         stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.subcommand](cfg, stdout, stderr)
    except InvalidStateError as exc:
        print(f"error: invalid state: {exc}", file=stderr)
    except (ConfigError, stateio.StateFormatError, measures.MeasurementError,
            lii.NotComputableError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
    return EXIT_USAGE


def run(argv: Sequence[str]) -> tuple[int, str, str]:
    """Run the CLI in-process and capture (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
