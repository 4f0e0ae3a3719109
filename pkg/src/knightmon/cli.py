"""Command line entry point: ``knight-monitor``."""

from __future__ import annotations

import argparse
import logging
import sys

from .experiment import ExperimentSpec, run_experiment
from .graph import ParseError, ValidationError

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _number(tok: str):
    tok = tok.strip()
    return float(tok) if any(c in tok for c in ".eE") else int(tok)


def _number_list(text: str):
    try:
        return [_number(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="knight-monitor",
                description="Sweep the (alpha, beta)-monitoring game over alpha, beta and k.")
    p.add_argument("--config", help="YAML file with experiment keys; flags override it")
    p.add_argument("--graph", help="edge-list file (src dst [prob])")
    p.add_argument("--alpha", type=_number_list, help="comma list; fractions (e.g. 0.1) scale with |V|")
    p.add_argument("--beta", type=_number_list, help="comma list; fractions scale with |V|")
    p.add_argument("--k", type=_number_list, help="comma list of monitor budgets")
    p.add_argument("--c1", type=int, help="attacker seed budget")
    p.add_argument("--c2", type=int, help="attacker edge-override budget")
    p.add_argument("--samples", type=int, help="Monte Carlo worlds per estimate")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int, help="master seed; rep r uses seed + r")
    p.add_argument("--max-iters", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--out", help="results CSV path")
    p.add_argument("--workers", type=int)
    p.add_argument("--default-prob", help="edge probability when the file has none: a number or 'random'")
    p.add_argument("--interval", type=float, help="constant adjustable-interval offset per edge")
    p.add_argument("--defender-oracle", choices=["greedy", "greedy_naive", "brute_force"])
    p.add_argument("--no-timing", dest="timing", action="store_const", const=False,
                   help="write wall_ms as 0 so result files are byte-reproducible")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    overrides = {
        "graph": args.graph, "alpha": args.alpha, "beta": args.beta, "k": args.k,
        "c1": args.c1, "c2": args.c2, "samples": args.samples, "epsilon": args.epsilon,
        "seed": args.seed, "max_iters": args.max_iters, "reps": args.reps, "out": args.out,
        "workers": args.workers, "interval": args.interval,
        "defender_oracle": args.defender_oracle, "timing": args.timing,
    }
    if args.default_prob is not None:
        overrides["default_prob"] = args.default_prob if args.default_prob == "random" else float(args.default_prob)
    try:
        if args.config:
            spec = ExperimentSpec.from_yaml(args.config, **overrides)
        else:
            if args.graph is None:
                print("knight-monitor: error: --graph or --config is required", file=sys.stderr)
                return EXIT_USAGE
            spec = ExperimentSpec.from_mapping({k: v for k, v in overrides.items() if v is not None})
    except (OSError, ValueError, TypeError) as exc:
        print(f"knight-monitor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        net = spec.load_graph()
    except (OSError, ParseError, ValidationError) as exc:
        print(f"knight-monitor: cannot load graph: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        spec.cells(net.node_count)
    except ValueError as exc:
        print(f"knight-monitor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = run_experiment(spec, net)
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
