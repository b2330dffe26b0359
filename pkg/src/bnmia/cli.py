"""Command-line interface: sample datasets, score targets, run experiments,
verify the numerical equivalences, and time the posterior.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 verification
failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import attacks as atk
from . import harness
from .formats import NetworkFormatError, load_document, parse_bif_subset, parse_sexpr
from .inference import ImpossibleEvidenceError
from .learning import ProxyDataset
from .model import (
    BayesianNetwork,
    ModelSizeError,
    ReleasedCounts,
    attribute_marginals,
    validate,
)
from .populations import load_benchmark

USAGE_ERROR = 1
DATA_ERROR = 2
VERIFY_FAILURE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _load_network(args) -> BayesianNetwork:
    source = args.network
    path = Path(source)
    if path.exists():
        if args.format == "sexp" or (args.format == "auto" and path.suffix == ".sexp"):
            bn = parse_sexpr(path.read_text(encoding="utf-8"))
        elif args.format == "bif" or (args.format == "auto" and path.suffix == ".bif"):
            bn = parse_bif_subset(path.read_text(encoding="utf-8"))
        else:
            bn = load_document(path).network
        bn = bn.with_outputs(bn.node_names, "one-hot")
    else:
        bn = load_benchmark(source)
    if getattr(args, "outputs", None):
        outputs = tuple(v.strip() for v in args.outputs.split(","))
        bn = bn.with_outputs(outputs, args.encoding or bn.encoding)
    elif getattr(args, "encoding", None):
        bn = bn.with_outputs(bn.output_nodes, args.encoding)
    problems = validate(bn)
    if problems:
        raise NetworkFormatError("; ".join(problems), 0, 0)
    return bn


def _cmd_sample(args) -> int:
    bn = _load_network(args)
    rng = np.random.default_rng(args.seed)
    proxy = ProxyDataset.from_network_samples(bn, args.n, rng)
    text = proxy.to_csv()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_attack(args) -> int:
    bn = _load_network(args)
    counts_vec = tuple(int(x) for x in args.counts.split(","))
    counts = ReleasedCounts(counts_vec, args.n)
    y = tuple(int(x) for x in args.target.split(","))
    if len(y) != bn.d or len(counts_vec) != bn.d:
        raise NetworkFormatError(
            f"counts and target must have length d={bn.d}", 0, 0
        )
    mu = attribute_marginals(bn)
    if args.attack == "lrt":
        score = atk.lrt_score(mu, counts, y)
    elif args.attack == "lrt_clipped":
        if args.clip_lo is None or args.clip_hi is None:
            print("lrt_clipped needs --clip-lo and --clip-hi", file=sys.stderr)
            return USAGE_ERROR
        score = atk.lrt_clipped_score(mu, counts, y, atk.ClipRange(args.clip_lo, args.clip_hi))
    elif args.attack == "inner_product":
        score = atk.inner_product_score(mu, counts, y)
    else:
        score = atk.bayes_score(bn, counts, y)
    print(f"{score.kind} {score.value:.12g}")
    if args.threshold is not None:
        print(atk.decide(score, args.threshold))
    return 0


def _cmd_eval(args) -> int:
    attacks = tuple(a.strip() for a in args.attacks.split(","))
    config = harness.ExperimentConfig(
        population=args.network,
        n=args.n,
        output_nodes=tuple(v.strip() for v in args.outputs.split(",")) if args.outputs else None,
        encoding=args.encoding,
        trials=args.trials,
        targets_in=args.targets_in,
        targets_out=args.targets_out,
        threat=args.threat,
        m=args.m,
        attacks=attacks,
        seed=args.seed,
        workers=args.workers,
    )
    result = harness.run_experiment(config)
    out = Path(args.out)
    out.write_text(result.rows_csv(), encoding="utf-8")
    summary_path = out.with_name(out.stem + ".summary" + out.suffix)
    summary_path.write_text(result.summary_csv(), encoding="utf-8")
    for row in result.summary:
        flagged = result.impossible_evidence.get(row.attack, 0)
        extra = f"  [impossible evidence on {flagged} scores]" if flagged else ""
        print(
            f"{row.population} n={row.n} {row.threat} {row.attack}: "
            f"AUC {row.mean_auc:.3f} +/- {row.std_auc:.3f} over {row.trials} trials{extra}"
        )
    print(f"wrote {out} and {summary_path}")
    return 0


def _cmd_verify(args) -> int:
    suites = harness.verify_equivalences(
        product_populations=args.populations, identity_samples=args.samples, seed=args.seed
    )
    failed = False
    for s in suites:
        status = "PASS" if s.passed else ("FAIL (known gap)" if s.advisory else "FAIL")
        print(
            f"{status:16s} {s.name}: max deviation {s.max_deviation:.3e} "
            f"(tolerance {s.tolerance:.0e}, {s.cases} cases, {s.seconds:.1f}s)"
        )
        if s.note:
            print(f"{'':16s} note: {s.note}")
        failed = failed or (not s.passed and not s.advisory)
    return VERIFY_FAILURE if failed else 0


def _cmd_bench(args) -> int:
    rows = harness.bench_posterior(
        [p.strip() for p in args.networks.split(",")],
        n=args.n,
        datasets=args.datasets,
        targets=args.targets,
        seed=args.seed,
    )
    print(f"{'population':>16s} {'nodes':>6s} {'dims':>5s} {'out':>4s} {'d':>4s} {'sec/call':>10s}")
    for r in rows:
        print(
            f"{r.population:>16s} {r.num_nodes:>6d} {r.param_dim:>5d} "
            f"{r.num_output_nodes:>4d} {r.output_dim:>4d} {r.mean_seconds:>10.4f}"
        )
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="bnmia", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common_net = argparse.ArgumentParser(add_help=False)
    common_net.add_argument("--network", required=True,
                            help="builtin population name or a .sexp/.bif path")
    common_net.add_argument("--format", choices=("auto", "sexp", "bif"), default="auto")
    common_net.add_argument("--outputs", help="comma-separated output node names")
    common_net.add_argument("--encoding", choices=("raw-binary", "one-hot"))

    p = sub.add_parser("sample", parents=[common_net],
                       help="emit a dataset CSV sampled from a network")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("attack", parents=[common_net], help="score one target")
    p.add_argument("--counts", required=True, help="comma-separated released counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--target", required=True, help="comma-separated encoded target bits")
    p.add_argument("--attack", required=True,
                   choices=("lrt", "lrt_clipped", "inner_product", "bayes"))
    p.add_argument("--clip-lo", type=int)
    p.add_argument("--clip-hi", type=int)
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("eval", parents=[common_net], help="run a full experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=40)
    p.add_argument("--targets-in", type=int, default=20)
    p.add_argument("--targets-out", type=int, default=20)
    p.add_argument("--threat", choices=harness.THREATS, default=harness.STRONG)
    p.add_argument("--m", type=int)
    p.add_argument("--attacks", default=",".join(harness.DEFAULT_ATTACKS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="results.csv")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("verify", help="run the numerical equivalence suites")
    p.add_argument("--populations", type=int, default=200)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=20250810)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="time the posterior computation")
    p.add_argument("--networks", default="product:10,cancer,asia")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--datasets", type=int, default=20)
    p.add_argument("--targets", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NetworkFormatError, ModelSizeError, ImpossibleEvidenceError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return DATA_ERROR
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
