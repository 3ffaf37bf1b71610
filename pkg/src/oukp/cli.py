"""Command-line harness.

Subcommands: solve, run, evaluate, family, minimax, constants, accept.
Reports are JSON/text/CSV; `--plot DIR` renders matplotlib figures to files
next to the delimited output.  The default seed comes from OUKP_SEED.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import acceptance, advice
from .adversary import FAMILY_KINDS, det_minimax, rand_minimax_chain, det_minimax_with_advice
from .core import format_instance_text, load_instance, to_rational
from .harness import (
    DETERMINISTIC_ALGORITHMS,
    RANDOMIZED_ALGORITHMS,
    ExperimentConfig,
    default_seed,
    evaluate_deterministic,
    evaluate_randomized,
    parse_family_spec,
    report_to_csv,
    report_to_json,
    report_to_text,
)
from .numerics import cdf_X, compute_constants
from .oracle import DEFAULT_DP_LIMIT, opt_exact


def _frac_json(value):
    if isinstance(value, Fraction):
        return str(value)
    raise TypeError(f"not JSON serializable: {value!r}")


_CONFIG_KEYS = ("seed", "trials", "eps", "p", "n", "dp_limit", "family")


def _apply_config(args) -> None:
    """Fill unset options from a JSON config file; flags always win."""
    if not getattr(args, "config", None):
        return
    loaded = json.loads(Path(args.config).read_text())
    unknown = set(loaded) - set(_CONFIG_KEYS)
    if unknown:
        raise SystemExit(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key, value in loaded.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _cmd_solve(args) -> int:
    inst = load_instance(args.file)
    result = opt_exact(inst, dp_limit=args.dp_limit)
    payload = {
        "instance": inst.name,
        "kind": inst.kind,
        "items": len(inst),
        "opt": str(result.value),
        "opt_float": float(result.value),
        "witness": {str(i): c for i, c in result.witness.counts},
    }
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_run(args) -> int:
    _apply_config(args)
    dp_limit = args.dp_limit if args.dp_limit is not None else DEFAULT_DP_LIMIT
    trials = args.trials if args.trials is not None else 1000
    inst = load_instance(args.file)
    opt = opt_exact(inst, dp_limit=dp_limit).value
    seed = args.seed if args.seed is not None else default_seed()
    payload = {"instance": inst.name, "algorithm": args.algorithm, "opt": str(opt)}
    if args.algorithm in DETERMINISTIC_ALGORITHMS:
        config = ExperimentConfig(
            args.algorithm,
            instances=[inst],
            eps=to_rational(args.eps) if args.eps else None,
            dp_limit=dp_limit,
        )
        report = evaluate_deterministic(config)
        record = report.records[0]
        payload.update(
            gain=str(record.gain),
            ratio="unbounded" if record.unbounded else str(record.ratio),
        )
        if args.algorithm == "eps_advice":
            tape = advice.eps_advice_oracle(inst, to_rational(args.eps or "1/10"))
            payload["advice_bits"] = len(tape)
            payload["advice_hex"] = tape.hex_dump()
    elif args.algorithm in RANDOMIZED_ALGORITHMS:
        config = ExperimentConfig(
            args.algorithm,
            instances=[inst],
            trials=trials,
            seed=seed,
            p=to_rational(args.p) if args.p else None,
            n=args.n,
            dp_limit=dp_limit,
        )
        report = evaluate_randomized(config)
        record = report.records[0]
        payload.update(
            trials=trials,
            seed=seed,
            mean_gain=record.expected_gain,
            ratio="unbounded" if record.unbounded else record.ratio,
            stats=dict(record.stats),
        )
    else:
        print(f"unknown algorithm {args.algorithm!r}", file=sys.stderr)
        return 2
    print(json.dumps(payload, indent=2, default=_frac_json))
    return 0


def _cmd_evaluate(args) -> int:
    _apply_config(args)
    seed = args.seed if args.seed is not None else default_seed()
    config = ExperimentConfig(
        args.algorithm,
        family=args.family,
        instances=[load_instance(f) for f in args.instances or []],
        trials=args.trials if args.trials is not None else 1000,
        seed=seed,
        eps=to_rational(args.eps) if args.eps else None,
        p=to_rational(args.p) if args.p else None,
        n=args.n,
        dp_limit=args.dp_limit if args.dp_limit is not None else DEFAULT_DP_LIMIT,
    )
    if args.algorithm in DETERMINISTIC_ALGORITHMS:
        report = evaluate_deterministic(config)
    elif args.algorithm in RANDOMIZED_ALGORITHMS:
        report = evaluate_randomized(config)
    else:
        print(f"unknown algorithm {args.algorithm!r}", file=sys.stderr)
        return 2
    wrote = []
    if args.json:
        Path(args.json).write_text(report_to_json(report))
        wrote.append(args.json)
    if args.csv:
        Path(args.csv).write_text(report_to_csv(report))
        wrote.append(args.csv)
    if args.plot:
        from . import plots

        plot_dir = Path(args.plot)
        plot_dir.mkdir(parents=True, exist_ok=True)
        target = plot_dir / f"{args.algorithm}_ratios.png"
        plots.plot_ratio_report(report, target)
        wrote.append(str(target))
    print(report_to_text(report), end="")
    for path in wrote:
        print(f"wrote {path}")
    return 0


def _cmd_family(args) -> int:
    family = parse_family_spec(args.spec)
    instances = family.instances()
    if args.emit:
        out_dir = Path(args.emit)
        out_dir.mkdir(parents=True, exist_ok=True)
        for inst in instances:
            name = inst.name.replace("[", "_").replace("]", "") + ".txt"
            (out_dir / name).write_text(format_instance_text(inst))
        print(f"wrote {len(instances)} instances to {out_dir}")
    else:
        for inst in instances:
            print(f"# {inst.name}")
            print(format_instance_text(inst), end="")
            print()
    return 0


def _cmd_minimax(args) -> int:
    family = parse_family_spec(args.spec)
    if args.randomized:
        result = rand_minimax_chain(family)
        payload = {
            "family": args.spec,
            "mode": "randomized",
            "ratio": "unbounded" if result.ratio is None else str(result.ratio),
            "ratio_float": None if result.ratio is None else float(result.ratio),
            "probabilities": [str(p) for p in result.probabilities],
        }
    elif args.advice_bits is not None:
        result = det_minimax_with_advice(family, args.advice_bits)
        payload = {
            "family": args.spec,
            "mode": f"deterministic with {args.advice_bits} advice bits",
            "ratio": "unbounded" if result.ratio is None else str(result.ratio),
            "ratio_float": None if result.ratio is None else float(result.ratio),
            "groups": [list(g) for g in result.groups or ()],
        }
    else:
        result = det_minimax(family)
        payload = {
            "family": args.spec,
            "mode": "deterministic",
            "ratio": "unbounded" if result.ratio is None else str(result.ratio),
            "ratio_float": None if result.ratio is None else float(result.ratio),
            "witness": {
                f"{node} fill={fill} gain={gain}": count
                for (node, fill, gain), count in sorted(
                    (result.witness or {}).items(), key=lambda kv: str(kv[0])
                )
                if count
            },
        }
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_constants(args) -> int:
    dist = compute_constants(args.tol)
    payload = {
        "p_half": dist.p_half,
        "p_two_thirds": dist.p_two_thirds,
        "one_over_p_half": 1.0 / dist.p_half,
        "integral_j": dist.integral_j,
        "eq1_residual": dist.eq1_residual,
        "eq2_residual": dist.eq2_residual,
        "cdf_at_1": cdf_X(dist, 1.0),
    }
    if args.plot:
        from . import plots

        plot_dir = Path(args.plot)
        plot_dir.mkdir(parents=True, exist_ok=True)
        target = plot_dir / "threshold_distribution.png"
        plots.plot_distribution(dist, target)
        payload["figure"] = str(target)
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_accept(args) -> int:
    only = None
    if args.only:
        only = {int(x) for x in args.only.split(",")}
    results = acceptance.run_all(seed=args.seed, only=only, log=print)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oukp",
        description="Online unbounded knapsack: oracles, strategies, families, minimax.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="exact offline optimum of an instance file")
    p.add_argument("file")
    p.add_argument("--dp-limit", type=int, default=DEFAULT_DP_LIMIT)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("run", help="run one algorithm on one instance file")
    p.add_argument("algorithm", choices=DETERMINISTIC_ALGORITHMS + RANDOMIZED_ALGORITHMS)
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--eps", default=None)
    p.add_argument("--p", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--dp-limit", type=int, default=None)
    p.add_argument("--config", default=None, help="JSON defaults; flags override")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("evaluate", help="evaluate an algorithm over a family or files")
    p.add_argument("algorithm", choices=DETERMINISTIC_ALGORITHMS + RANDOMIZED_ALGORITHMS)
    p.add_argument("--family", default=None, help="kind:key=value,... e.g. det2:eps=1/100")
    p.add_argument("--instances", nargs="*", default=None, help="instance files")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--eps", default=None)
    p.add_argument("--p", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--dp-limit", type=int, default=None)
    p.add_argument("--config", default=None, help="JSON defaults; flags override")
    p.add_argument("--json", default=None, help="write the JSON report here")
    p.add_argument("--csv", default=None, help="write the CSV table here")
    p.add_argument("--plot", default=None, help="render figures into this directory")
    p.set_defaults(fn=_cmd_evaluate)

    p = sub.add_parser("family", help="emit a lower-bound family as instance files")
    p.add_argument("spec", help=f"kind:params with kind in {', '.join(FAMILY_KINDS)}")
    p.add_argument("--emit", default=None, help="write one file per instance here")
    p.set_defaults(fn=_cmd_family)

    p = sub.add_parser("minimax", help="exact minimax ratio against a family")
    p.add_argument("spec")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--advice-bits", type=int, default=None)
    group.add_argument("--randomized", action="store_true")
    p.set_defaults(fn=_cmd_minimax)

    p = sub.add_parser("constants", help="threshold distribution constants as JSON")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--plot", default=None, help="render the distribution figure here")
    p.set_defaults(fn=_cmd_constants)

    p = sub.add_parser("accept", help="run the acceptance suite (exit 0 iff all pass)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--only", default=None, help="comma-separated criterion numbers")
    p.set_defaults(fn=_cmd_accept)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
