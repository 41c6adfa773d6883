"""Command-line front end: explain, ground-truth, evaluate, synthetic."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .attribution import EstimatorConfig, pointwise_shap_explain, rankingshap_explain
from .data import group_by_query, parse_letor, sample_background
from .errors import RankShapError
from .evaluation import (
    estimate_ground_truth,
    expand_method_names,
    order_metric,
    run_benchmark,
    stability_curve,
    valdis_metric,
)
from .objectives import make_objective, reference_ranking
from .rankers import load_scorer
from .synthetic import run_synthetic, write_synthetic_csv

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("RANKSHAP_THREADS", "1")))
    except ValueError:
        return 1


def _map_queries(fn, items):
    """Apply fn over queries, optionally in a thread pool; output keeps input order."""
    workers = _worker_count()
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _load_dataset(path: str):
    docs = parse_letor(Path(path).read_text())
    groups = group_by_query(docs)
    if not groups:
        raise RankShapError(f"no documents parsed from {path}")
    return docs, groups


def _run_config(args, extra=None) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    if extra:
        cfg.update(extra)
    return cfg


def cmd_explain(args) -> int:
    docs, groups = _load_dataset(args.data)
    scorer = load_scorer(args.scorer)
    n = groups[0].n
    n_samples = args.nsamples if args.nsamples is not None else 2 * n + 2048
    background = sample_background(docs, args.background, args.seed)
    cfg = EstimatorConfig(kind=args.estimator, n_samples=n_samples, seed=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def explain_one(group):
        objective = make_objective(args.objective, reference_ranking(group, scorer))
        return rankingshap_explain(group, scorer, objective, background, cfg)

    attrs = _map_queries(explain_one, groups)
    for group, attr in zip(groups, attrs):
        attr.meta["config"] = _run_config(args, {"n_samples": n_samples})
        attr.save(out_dir / f"query_{group.query_id}.csv")
    print(f"wrote {len(groups)} attribution files to {out_dir}")
    return EXIT_OK


def cmd_ground_truth(args) -> int:
    if args.runs < 2:
        raise ValueError("ground truth needs --runs >= 2 (std undefined otherwise)")
    docs, groups = _load_dataset(args.data)
    if args.query is not None:
        groups = [g for g in groups if g.query_id == args.query]
        if not groups:
            raise RankShapError(f"query {args.query!r} not found")
    scorer = load_scorer(args.scorer)
    background = sample_background(docs, args.background, args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def gt_one(group):
        objective = make_objective(args.objective, reference_ranking(group, scorer))
        return group, objective, estimate_ground_truth(
            group, scorer, objective, background, args.nsamples, args.runs, args.seed
        )

    for group, objective, gt in _map_queries(gt_one, groups):
        prefix = out_dir / f"gt_{group.query_id}"
        gt.mean_attribution.meta["config"] = _run_config(args)
        gt.mean_attribution.save(prefix.with_suffix(".csv"))
        for r, attr in enumerate(gt.per_run):
            attr.save(prefix.parent / f"{prefix.name}_run{r}.csv")
        summary = {
            "query_id": group.query_id,
            "std_per_feature": gt.std_per_feature.tolist(),
            "mean_std": float(gt.std_per_feature.mean()),
            "n_samples": gt.n_samples,
            "runs": gt.runs,
            "seed": args.seed,
        }
        if args.stability:
            sizes = [int(s) for s in args.stability.split(",")]
            rows = stability_curve(
                group, scorer, objective, background, sizes,
                runs=args.runs, seed=args.seed,
            )
            summary["stability"] = [vars(r) for r in rows]
        (prefix.parent / f"{prefix.name}_stability.json").write_text(
            json.dumps(summary, indent=2)
        )
    print(f"wrote ground truth bundles for {len(groups)} queries to {out_dir}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if args.gt_file:
        from .attribution import Attribution

        gt_path = Path(args.gt_file)
        if not gt_path.exists():
            raise ValueError(f"ground-truth file not found: {gt_path}")
        gt = Attribution.load(gt_path)
        with Path(args.out).open("w") as fh:
            fh.write("method,order_all,valdis_all\n")
            for pred_file in args.pred or []:
                pred = Attribution.load(pred_file)
                if pred.n != gt.n:
                    raise ValueError(
                        f"feature dimension mismatch: gt has {gt.n}, {pred_file} has {pred.n}"
                    )
                fh.write(
                    f"{Path(pred_file).stem},{order_metric(gt, pred)},{valdis_metric(gt, pred)}\n"
                )
        print(f"wrote evaluation to {args.out}")
        return EXIT_OK

    _, groups = _load_dataset(args.data)
    scorer = load_scorer(args.scorer)
    cfg = EstimatorConfig(kind=args.estimator, n_samples=args.nsamples, seed=args.seed)
    methods = expand_method_names(args.methods.split(","))
    report = run_benchmark(
        groups,
        scorer,
        args.objective,
        methods,
        cfg,
        gt_source=args.gt,
        background_size=args.background,
        seed=args.seed,
    )
    report.to_csv(args.out)
    per_query = Path(args.out).with_suffix(".jsonl")
    report.per_query_jsonl(per_query)
    print(f"wrote report to {args.out} (per-query records: {per_query})")
    return EXIT_OK


def cmd_synthetic(args) -> int:
    rows = run_synthetic(
        variant=args.variant,
        methods=tuple(args.methods.split(",")),
        seed=args.seed,
    )
    write_synthetic_csv(rows, args.out)
    sidecar = Path(args.out).with_suffix(".json")
    sidecar.write_text(json.dumps(_run_config(args), indent=2, sort_keys=True))
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankshap", description="Listwise Shapley feature attribution for rankers"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explain", help="attribute per-query ranking objectives")
    p.add_argument("--data", required=True)
    p.add_argument("--scorer", required=True)
    p.add_argument("--objective", default="kendall")
    p.add_argument("--estimator", default="kernel", choices=["exact", "permutation", "kernel"])
    p.add_argument("--nsamples", type=int, default=None)
    p.add_argument("--background", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="attributions")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("ground-truth", help="high-budget permutation-sampling estimate")
    p.add_argument("--data", required=True)
    p.add_argument("--scorer", required=True)
    p.add_argument("--objective", default="kendall")
    p.add_argument("--nsamples", type=int, default=2**16)
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--background", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--query", default=None)
    p.add_argument("--stability", default=None, help="comma-separated sample sizes")
    p.add_argument("--out", default="ground_truth")
    p.set_defaults(func=cmd_ground_truth)

    p = sub.add_parser("evaluate", help="order/valdis metrics against ground truth")
    p.add_argument("--data")
    p.add_argument("--scorer")
    p.add_argument("--objective", default="kendall")
    p.add_argument("--methods", default="rankingshap,pointwise,greedy5,random")
    p.add_argument("--estimator", default="kernel", choices=["exact", "permutation", "kernel"])
    p.add_argument("--nsamples", type=int, default=2048)
    p.add_argument("--background", type=int, default=10)
    p.add_argument("--gt", default="exact", choices=["exact", "estimated"])
    p.add_argument("--gt-file", default=None, help="evaluate saved attribution CSVs instead")
    p.add_argument("--pred", nargs="*", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="report.csv")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synthetic", help="talent-search scenario attributions")
    p.add_argument("--variant", default="biased", choices=["biased", "unbiased"])
    p.add_argument("--methods", default="rankingshap,pointwise,greedy2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="synthetic.csv")
    p.set_defaults(func=cmd_synthetic)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RankShapError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
