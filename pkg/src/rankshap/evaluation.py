"""Ground-truth attribution estimation, stability analysis, and faithfulness metrics."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .attribution import (
    Attribution,
    EstimatorConfig,
    _background_array,
    exact_shapley,
    permutation_shapley,
    pointwise_shap_explain,
    rankingshap_explain,
)
from .baselines import greedy_attribution, random_attribution
from .data import BackgroundSet, QueryGroup, sample_background
from .errors import DimensionError
from .objectives import ListwiseGame, ListwiseObjective, make_objective, reference_ranking
from .rankers import Scorer


@dataclass
class GroundTruth:
    """High-budget importance estimate with cross-run stability statistics."""

    mean_attribution: Attribution
    per_run: list[Attribution]
    std_per_feature: np.ndarray
    n_samples: int
    runs: int


def _spawn_seeds(seed: int, count: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def estimate_ground_truth(
    group: QueryGroup,
    scorer: Scorer,
    objective: ListwiseObjective,
    background: BackgroundSet | np.ndarray,
    n_samples: int = 2**16,
    runs: int = 3,
    seed: int = 0,
) -> GroundTruth:
    """Permutation-sampling estimate repeated over independent runs.

    Reports the per-run attributions, their mean, and the per-feature sample
    standard deviation (ddof=1) across runs.
    """
    if runs < 2:
        raise ValueError(f"need at least 2 runs for a std estimate, got {runs}")
    game = ListwiseGame(group, scorer, objective, _background_array(background))
    per_run = [
        permutation_shapley(game.value, game.n, background, n_samples, run_seed)
        for run_seed in _spawn_seeds(seed, runs)
    ]
    stacked = np.stack([a.values for a in per_run])
    mean_attr = Attribution(
        values=stacked.mean(axis=0),
        base_value=float(np.mean([a.base_value for a in per_run])),
        meta={
            "estimator": "ground-truth",
            "n_samples": n_samples,
            "runs": runs,
            "seed": seed,
            "background_size": len(_background_array(background)),
            "objective": objective.describe(),
        },
    )
    return GroundTruth(
        mean_attribution=mean_attr,
        per_run=per_run,
        std_per_feature=stacked.std(axis=0, ddof=1),
        n_samples=n_samples,
        runs=runs,
    )


@dataclass
class StabilityRow:
    n_samples: int
    mean_std_all: float
    mean_std_top5: float


def stability_curve(
    group: QueryGroup,
    scorer: Scorer,
    objective: ListwiseObjective,
    background_pool: BackgroundSet | np.ndarray,
    sample_sizes: list[int],
    runs: int = 3,
    mode: str = "same_background",
    background_size: int | None = None,
    seed: int = 0,
) -> list[StabilityRow]:
    """Cross-run attribution std as a function of the sampling budget.

    same_background reuses one background set for all runs; independent_background
    draws a fresh background of `background_size` vectors from the pool per run.
    """
    if mode not in ("same_background", "independent_background"):
        raise ValueError(f"unknown mode {mode!r}")
    if not sample_sizes:
        raise ValueError("sample_sizes must be non-empty")
    pool = _background_array(background_pool)
    size = background_size or len(pool)
    rows = []
    for n_samples in sample_sizes:
        run_values = []
        bg_seeds = _spawn_seeds(seed ^ 0x5AB1E, runs)
        for run_idx, run_seed in enumerate(_spawn_seeds(seed + n_samples, runs)):
            if mode == "independent_background":
                rng = np.random.default_rng(bg_seeds[run_idx])
                idx = rng.choice(len(pool), size=size, replace=size > len(pool))
                background = pool[idx]
            else:
                background = pool[:size]
            game = ListwiseGame(group, scorer, objective, background)
            attr = permutation_shapley(game.value, game.n, background, n_samples, run_seed)
            run_values.append(attr.values)
        stacked = np.stack(run_values)
        std = stacked.std(axis=0, ddof=1)
        top5 = np.argsort(-np.abs(stacked.mean(axis=0)), kind="stable")[:5]
        rows.append(
            StabilityRow(
                n_samples=n_samples,
                mean_std_all=float(std.mean()),
                mean_std_top5=float(std[top5].mean()),
            )
        )
    return rows


def _values_of(attr) -> np.ndarray:
    return np.asarray(getattr(attr, "values", attr), dtype=float)


def _attribution_ranks(values: np.ndarray) -> np.ndarray:
    """Rank features descending by value; ties give the lower index the better rank."""
    order = np.argsort(-values, kind="stable")
    ranks = np.empty(len(values), dtype=int)
    ranks[order] = np.arange(len(values))
    return ranks


def order_metric(gt, pred, k: int | None = None) -> float:
    """Spearman's footrule between the gt and predicted feature rankings.

    With k, the sum runs only over the top-k features of the ground truth.
    """
    gt_v, pred_v = _values_of(gt), _values_of(pred)
    if gt_v.shape != pred_v.shape:
        raise DimensionError(f"length mismatch: {gt_v.shape} vs {pred_v.shape}")
    if k is not None and not 1 <= k <= len(gt_v):
        raise ValueError(f"k must be in [1, {len(gt_v)}], got {k}")
    gt_ranks = _attribution_ranks(gt_v)
    pred_ranks = _attribution_ranks(pred_v)
    diffs = np.abs(gt_ranks - pred_ranks)
    if k is None:
        return float(diffs.sum())
    top = np.argsort(-gt_v, kind="stable")[:k]
    return float(diffs[top].sum())


def valdis_metric(gt, pred, k: int | None = None) -> float:
    """Mean L1 distance between attribution values (top-k of gt when k given)."""
    gt_v, pred_v = _values_of(gt), _values_of(pred)
    if gt_v.shape != pred_v.shape:
        raise DimensionError(f"length mismatch: {gt_v.shape} vs {pred_v.shape}")
    if k is not None and not 1 <= k <= len(gt_v):
        raise ValueError(f"k must be in [1, {len(gt_v)}], got {k}")
    diffs = np.abs(gt_v - pred_v)
    if k is None:
        return float(diffs.mean())
    top = np.argsort(-gt_v, kind="stable")[:k]
    return float(diffs[top].sum() / k)


@dataclass
class EvalReport:
    """Aggregated faithfulness metrics, one row per attribution method."""

    rows: dict[str, dict[str, float]]
    ks: tuple[int, ...]
    per_query: list[dict] = field(default_factory=list)
    skipped_queries: int = 0

    def columns(self) -> list[str]:
        cols = ["order_all"] + [f"order@{k}" for k in self.ks]
        cols += ["valdis_all"] + [f"valdis@{k}" for k in self.ks]
        return cols

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method"] + self.columns())
            for method, row in self.rows.items():
                writer.writerow([method] + [repr(row[c]) for c in self.columns()])

    def per_query_jsonl(self, path: str | Path) -> None:
        with Path(path).open("w") as fh:
            for record in self.per_query:
                fh.write(json.dumps(record) + "\n")


def expand_method_names(names) -> list[str]:
    """`greedy<k>` expands to its iter and marg variants."""
    out = []
    for name in names:
        if name.startswith("greedy") and not name.endswith(("_iter", "_marg")):
            out += [f"{name}_iter", f"{name}_marg"]
        else:
            out.append(name)
    return out


def _run_method(name, group, scorer, objective, background, cfg: EstimatorConfig, seed):
    qcfg = EstimatorConfig(cfg.kind, cfg.n_samples, seed, cfg.exact_limit)
    if name == "rankingshap":
        return rankingshap_explain(group, scorer, objective, background, qcfg).values
    if name == "pointwise":
        return pointwise_shap_explain(group, scorer, background, qcfg).values
    if name == "random":
        return random_attribution(group.n, seed).values
    if name.startswith("greedy"):
        spec, _, variant = name.partition("_")
        k = int(spec[len("greedy"):])
        result = greedy_attribution(group, scorer, objective, background, k)
        return result.attributions_marg if variant == "marg" else result.attributions_iter
    raise ValueError(f"unknown method {name!r}")


def run_benchmark(
    dataset: list[QueryGroup],
    scorer: Scorer,
    objective_spec: str,
    methods,
    cfg: EstimatorConfig,
    gt_source: str = "exact",
    background_size: int = 10,
    gt_n_samples: int = 2**16,
    gt_runs: int = 3,
    ks: tuple[int, ...] = (3, 10),
    seed: int = 0,
) -> EvalReport:
    """Compare attribution methods against ground-truth importance per query.

    Backgrounds are drawn per query from that query's own documents. Queries
    with a single document are skipped and counted.
    """
    if gt_source not in ("exact", "estimated"):
        raise ValueError(f"unknown gt_source {gt_source!r}")
    methods = expand_method_names(methods)
    ks = tuple(k for k in ks if dataset and k <= dataset[0].n)
    metric_names = (
        ["order_all"] + [f"order@{k}" for k in ks] + ["valdis_all"] + [f"valdis@{k}" for k in ks]
    )
    sums = {m: {c: 0.0 for c in metric_names} for m in methods}
    per_query = []
    skipped = 0
    counted = 0
    query_seeds = _spawn_seeds(seed, len(dataset))
    for group, qseed in zip(dataset, query_seeds):
        if len(group) == 1:
            skipped += 1
            continue
        background = sample_background(
            list(group.documents), min(background_size, len(group)), qseed
        )
        objective = make_objective(objective_spec, reference_ranking(group, scorer))
        game = ListwiseGame(group, scorer, objective, background)
        if gt_source == "exact":
            gt = exact_shapley(
                game.value, game.n, background,
                exact_limit=cfg.exact_limit, mean_value_fn=game.mean_value,
            ).values
        else:
            gt = estimate_ground_truth(
                group, scorer, objective, background, gt_n_samples, gt_runs, qseed
            ).mean_attribution.values
        counted += 1
        for name in methods:
            pred = gt if name == "gt" else _run_method(
                name, group, scorer, objective, background, cfg, qseed
            )
            record = {"query_id": group.query_id, "method": name}
            record["order_all"] = order_metric(gt, pred)
            record["valdis_all"] = valdis_metric(gt, pred)
            for k in ks:
                record[f"order@{k}"] = order_metric(gt, pred, k)
                record[f"valdis@{k}"] = valdis_metric(gt, pred, k)
            per_query.append(record)
            for c in metric_names:
                sums[name][c] += record[c]
    rows = {
        m: {c: (sums[m][c] / counted if counted else float("nan")) for c in metric_names}
        for m in methods
    }
    return EvalReport(rows=rows, ks=ks, per_query=per_query, skipped_queries=skipped)
