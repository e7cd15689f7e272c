"""``rwg`` command line: envs, evaluate, analyze, solve-prob.

Exit codes: 0 success, 1 usage error, 2 runtime or data error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .backend import BACKENDS, HAVE_COMPILED
from .envs import EnvError, get_spec, registered
from .harness import DEFAULT_ARCHS, DEFAULT_EPISODES, DEFAULT_SAMPLES, RunConfig, evaluate
from .policy import parse_arch
from .report import emit_csv, emit_svgs
from .stats import DEFAULT_BINS, DEFAULT_TOP_FRACTION, analyze, expected_waiting_time, success_probability
from .tensorfile import TensorFormatError, read_tensor, write_tensor

log = logging.getLogger("rwg")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage().rstrip()}\n{self.prog}: error: {message}")


def _arch_list(text: str) -> list:
    # list separator is ','; multi-layer specs use 'x' (e.g. "0,4,4x4:bias")
    try:
        return [parse_arch(part) for part in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _workers(text: str):
    return "auto" if text == "auto" else _positive_int(text)


def _fraction(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number in (0, 1], got {text!r}") from None
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"expected a number in (0, 1], got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rwg", description="Random weight guessing profiler for classic control environments.")
    p.add_argument("--version", action="version", version=f"rwg {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("envs", help="list registered environments")

    ev = sub.add_parser("evaluate", help="sample networks and score them (writes a .rwgt tensor)")
    ev.add_argument("--env", required=True)
    ev.add_argument("--arch", type=_arch_list, action="append",
                    help="comma-separated architectures, e.g. '0,4,4x4' or '4x4:bias' (repeatable); "
                    "default '0,4,4x4'")
    ev.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    ev.add_argument("--episodes", type=_positive_int, default=DEFAULT_EPISODES)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--workers", type=_workers, default="auto", help="parallel workers; never changes results")
    ev.add_argument("--backend", choices=BACKENDS, default="auto")
    ev.add_argument("--record-timing", action="store_true",
                    help="store wall-clock runtimes and a timestamp in the file (makes output bytes vary)")
    ev.add_argument("--out", required=True)

    an = sub.add_parser("analyze", help="statistics, CSV tables and SVG plots from a tensor")
    an.add_argument("tensor")
    an.add_argument("--bins", type=_positive_int, default=DEFAULT_BINS)
    an.add_argument("--top-frac", type=_fraction, default=DEFAULT_TOP_FRACTION)
    an.add_argument("--threshold", type=float, default=None, help="solve threshold (default: solved score)")
    an.add_argument("--outdir", required=True)
    an.add_argument("--svg", action="store_true", help="also render the three plots per architecture")

    sp = sub.add_parser("solve-prob", help="solve probability, success probability and expected waiting time")
    sp.add_argument("tensor")
    sp.add_argument("--threshold", type=float, default=None, help="default: the environment's solved score")
    sp.add_argument("--n", type=_positive_int, default=100, help="number of guesses N for 1-(1-p)^N")
    return p


def cmd_envs(args, out):
    out.write(f"{'name':<26} {'obs':>4}  {'actions':<24} {'max_steps':>9} {'solved':>7}\n")
    for name in registered():
        s = get_spec(name)
        out.write(f"{s.name:<26} {s.obs_dim:>4}  {s.action_space.describe():<24} {s.max_steps:>9} {s.solved_score:>7g}\n")
    return 0


def cmd_evaluate(args, out):
    archs = [a for group in args.arch for a in group] if args.arch else [parse_arch(a) for a in DEFAULT_ARCHS]
    config = RunConfig(args.env, tuple(archs), args.samples, args.episodes, args.seed, args.workers, args.backend)
    tensor = evaluate(config)
    runtimes = list(tensor.runtimes)
    if not args.record_timing:
        tensor.runtimes = None
        tensor.created = None
    nbytes = write_tensor(tensor, args.out)
    for arch, seconds in zip(tensor.architectures, runtimes):
        out.write(f"{config.env_name} arch={arch.label} params={arch.param_count} "
                  f"samples={config.n_samples} episodes={config.n_episodes} runtime_s={seconds:.3f}\n")
    log.info("wrote %s (%d bytes)", args.out, nbytes)
    return 0


def cmd_analyze(args, out):
    tensor = read_tensor(args.tensor)
    reports = analyze(tensor, threshold=args.threshold, bins=args.bins, top_fraction=args.top_frac)
    paths = emit_csv(reports, tensor, args.outdir)
    if args.svg:
        paths += emit_svgs(reports, tensor, args.outdir, highlight_fraction=args.top_frac)
    for path in paths:
        out.write(f"{path}\n")
    return 0


def cmd_solve_prob(args, out):
    tensor = read_tensor(args.tensor)
    reports = analyze(tensor, threshold=args.threshold)
    for rep in reports:
        p = rep.solve_fraction
        wait = "inf" if p == 0 else repr(expected_waiting_time(p))
        out.write(f"arch={rep.label} threshold={rep.threshold!r} p={p!r} "
                  f"success_prob(N={args.n})={success_probability(p, args.n)!r} expected_wait={wait}\n")
    return 0


COMMANDS = {"envs": cmd_envs, "evaluate": cmd_evaluate, "analyze": cmd_analyze, "solve-prob": cmd_solve_prob}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=err,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "evaluate" and args.backend == "compiled" and not HAVE_COMPILED:
        err.write("rwg: compiled backend requested but the extension is not built\n")
        return 2
    try:
        return COMMANDS[args.command](args, out)
    except FileNotFoundError as exc:
        err.write(f"rwg: file not found: {exc.filename}\n")
        return 2
    except (TensorFormatError, EnvError, OSError, ValueError, ArithmeticError, RuntimeError) as exc:
        err.write(f"rwg: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
