"""Shapley attribution estimators over coalition games.

Estimators work on a value function v(S, b) where S is the set of visible
feature indices and b one background vector; expectations over the background
set are always full means, so the exact estimator is deterministic.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .data import BackgroundSet, QueryGroup
from .errors import CapacityError, EstimationError
from .masking import coalition_to_template
from .objectives import ListwiseGame, ListwiseObjective
from .rankers import Scorer


@dataclass
class EstimatorConfig:
    kind: str = "exact"  # exact | permutation | kernel
    n_samples: int = 2048
    seed: int = 0
    exact_limit: int = 20

    def __post_init__(self):
        if self.kind not in ("exact", "permutation", "kernel"):
            raise ValueError(f"unknown estimator kind {self.kind!r}")


@dataclass
class Attribution:
    """Per-feature attribution values plus estimator metadata."""

    values: np.ndarray
    base_value: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not np.isfinite(self.values).all():
            raise ValueError("attribution values must be finite")

    @property
    def n(self) -> int:
        return len(self.values)

    def save(self, csv_path: str | Path) -> None:
        """Write `feature_index,phi` CSV plus a JSON sidecar with the metadata."""
        csv_path = Path(csv_path)
        with csv_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature_index", "phi"])
            for i, phi in enumerate(self.values):
                writer.writerow([i, repr(float(phi))])
        sidecar = dict(self.meta, base_value=self.base_value)
        csv_path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True))

    @classmethod
    def load(cls, csv_path: str | Path) -> "Attribution":
        csv_path = Path(csv_path)
        with csv_path.open() as fh:
            rows = list(csv.DictReader(fh))
        values = np.empty(len(rows))
        for row in rows:
            values[int(row["feature_index"])] = float(row["phi"])
        meta = {}
        base_value = 0.0
        sidecar = csv_path.with_suffix(".json")
        if sidecar.exists():
            meta = json.loads(sidecar.read_text())
            base_value = meta.pop("base_value", 0.0)
        return cls(values=values, base_value=base_value, meta=meta)


ValueFn = Callable[[Sequence[int], np.ndarray], float]


def shapley_weight(n: int, s: int) -> float:
    """Coalition weight s!(n-s-1)!/n! for a coalition of size s out of n features."""
    if not 0 <= s <= n - 1:
        raise ValueError(f"coalition size {s} out of range for n={n}")
    if n <= 170:
        return math.factorial(s) * math.factorial(n - s - 1) / math.factorial(n)
    return math.exp(math.lgamma(s + 1) + math.lgamma(n - s) - math.lgamma(n + 1))


def kernel_weight(n: int, s: int) -> float:
    """SHAP kernel weight (n-1) / (C(n,s) * s * (n-s)) for 1 <= s <= n-1."""
    if not 1 <= s <= n - 1:
        raise ValueError(f"interior coalition size {s} out of range for n={n}")
    return (n - 1) / (math.comb(n, s) * s * (n - s))


def _background_array(background) -> np.ndarray:
    return np.asarray(getattr(background, "vectors", background), dtype=float)


def _mask_to_indices(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if mask >> i & 1)


def _make_mean_value(value_fn: ValueFn, B: np.ndarray, mean_value_fn):
    if mean_value_fn is not None:
        return mean_value_fn
    return lambda visible: float(np.mean([value_fn(visible, b) for b in B]))


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a - ((a >> 1) & 0x55555555)
    a = (a & 0x33333333) + ((a >> 2) & 0x33333333)
    return (((a + (a >> 4)) & 0x0F0F0F0F) * 0x01010101) >> 24


def exact_shapley(
    value_fn: ValueFn,
    n: int,
    background,
    *,
    exact_limit: int = 20,
    mean_value_fn=None,
) -> Attribution:
    """Exact Shapley values by full coalition enumeration (2^n evaluations)."""
    if n > exact_limit:
        raise CapacityError(f"exact enumeration needs n <= {exact_limit}, got n={n}")
    B = _background_array(background)
    vtilde = _make_mean_value(value_fn, B, mean_value_fn)
    V = np.empty(1 << n)
    for mask in range(1 << n):
        V[mask] = vtilde(_mask_to_indices(mask, n))
    masks = np.arange(1 << n, dtype=np.uint32)
    sizes = _popcount(masks)
    w = np.array([shapley_weight(n, s) for s in range(n)])
    values = np.empty(n)
    for i in range(n):
        without = masks[(masks >> i) & 1 == 0]
        values[i] = np.sum(w[sizes[without]] * (V[without | (1 << i)] - V[without]))
    meta = {
        "estimator": "exact",
        "n_samples": 1 << n,
        "background_size": len(B),
        "seed": int(getattr(background, "seed", 0)),
    }
    return Attribution(values=values, base_value=float(V[0]), meta=meta)


def permutation_shapley(
    value_fn: ValueFn,
    n: int,
    background,
    n_samples: int,
    seed: int,
) -> Attribution:
    """Monte Carlo Shapley estimation by sampled feature permutations.

    One sample draws a permutation and one background vector and walks the
    permutation once, so it yields a marginal contribution for every feature
    at the cost of n+1 value evaluations.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    B = _background_array(background)
    rng = np.random.default_rng(seed)
    contrib = np.zeros(n)
    base_sum = 0.0
    for _ in range(n_samples):
        sigma = rng.permutation(n)
        b = B[rng.integers(len(B))]
        visible: list[int] = []
        prev = value_fn(tuple(visible), b)
        base_sum += prev
        for i in sigma:
            visible.append(int(i))
            cur = value_fn(tuple(visible), b)
            contrib[i] += cur - prev
            prev = cur
    meta = {
        "estimator": "permutation",
        "n_samples": n_samples,
        "background_size": len(B),
        "seed": seed,
    }
    return Attribution(values=contrib / n_samples, base_value=base_sum / n_samples, meta=meta)


def _solve_constrained_wls(Z: np.ndarray, y: np.ndarray, w: np.ndarray, delta: float) -> np.ndarray:
    """Weighted additive fit with the efficiency constraint sum(phi) = delta."""
    n = Z.shape[1]
    if n == 1:
        return np.array([delta])
    # Eliminate the last coefficient through the constraint, then solve WLS.
    y_adj = y - Z[:, -1] * delta
    X = Z[:, :-1] - Z[:, -1][:, None]
    sw = np.sqrt(w)[:, None]
    sol, _, rank, _ = np.linalg.lstsq(X * sw, (y_adj * np.sqrt(w)), rcond=None)
    if rank < n - 1:
        raise EstimationError(
            "singular kernel regression system; increase n_samples for a full-rank design"
        )
    phi = np.empty(n)
    phi[:-1] = sol
    phi[-1] = delta - sol.sum()
    return phi


def kernel_shap(
    value_fn: ValueFn,
    n: int,
    background,
    n_samples: int,
    seed: int,
    *,
    mean_value_fn=None,
) -> Attribution:
    """Shapley values by kernel-weighted least squares over sampled coalitions.

    Coalitions are drawn proportionally to the Shapley kernel in complement
    pairs; the empty and full coalitions are always evaluated and enter the
    fit only through the exact efficiency constraint. When the budget covers
    all 2^n coalitions the full enumeration is used instead of sampling.
    """
    if n_samples < 2:
        raise ValueError(f"kernel estimator needs n_samples >= 2, got {n_samples}")
    B = _background_array(background)
    vtilde = _make_mean_value(value_fn, B, mean_value_fn)
    base = vtilde(())
    v_full = vtilde(tuple(range(n)))
    delta = v_full - base
    if n == 1:
        phi = np.array([delta])
        meta = {"estimator": "kernel", "n_samples": 2, "background_size": len(B), "seed": seed}
        return Attribution(values=phi, base_value=base, meta=meta)

    counts: dict[int, float] = {}
    if n_samples >= (1 << n):
        # Full enumeration with exact kernel weights.
        for mask in range(1, (1 << n) - 1):
            counts[mask] = kernel_weight(n, int(mask).bit_count())
        evaluations = 1 << n
    else:
        rng = np.random.default_rng(seed)
        sizes = np.arange(1, n)
        p = (n - 1) / (sizes * (n - sizes))
        p /= p.sum()
        budget = n_samples - 2
        drawn = 0
        full_mask = (1 << n) - 1
        while drawn < budget:
            s = int(rng.choice(sizes, p=p))
            members = rng.choice(n, size=s, replace=False)
            mask = 0
            for i in members:
                mask |= 1 << int(i)
            counts[mask] = counts.get(mask, 0.0) + 1.0
            drawn += 1
            if drawn < budget:
                comp = full_mask ^ mask
                counts[comp] = counts.get(comp, 0.0) + 1.0
                drawn += 1
        evaluations = 2 + len(counts)

    masks = list(counts)
    Z = np.zeros((len(masks), n))
    y = np.empty(len(masks))
    w = np.empty(len(masks))
    for row, mask in enumerate(masks):
        visible = _mask_to_indices(mask, n)
        Z[row, list(visible)] = 1.0
        y[row] = vtilde(visible) - base
        w[row] = counts[mask]
    phi = _solve_constrained_wls(Z, y, w, delta)
    meta = {
        "estimator": "kernel",
        "n_samples": n_samples,
        "coalitions_evaluated": evaluations,
        "background_size": len(B),
        "seed": seed,
    }
    return Attribution(values=phi, base_value=base, meta=meta)


def _run_estimator(value_fn, n, background, cfg: EstimatorConfig, mean_value_fn=None) -> Attribution:
    if cfg.kind == "exact":
        return exact_shapley(
            value_fn, n, background, exact_limit=cfg.exact_limit, mean_value_fn=mean_value_fn
        )
    if cfg.kind == "permutation":
        return permutation_shapley(value_fn, n, background, cfg.n_samples, cfg.seed)
    return kernel_shap(
        value_fn, n, background, cfg.n_samples, cfg.seed, mean_value_fn=mean_value_fn
    )


def rankingshap_explain(
    group: QueryGroup,
    scorer: Scorer,
    objective: ListwiseObjective,
    background: BackgroundSet | np.ndarray,
    cfg: EstimatorConfig,
) -> Attribution:
    """Listwise Shapley attribution of the query's ranking objective."""
    B = _background_array(background)
    if len(group) == 1:
        # A single document makes every objective constant: all values are 0.
        meta = {
            "estimator": cfg.kind,
            "n_samples": 0,
            "background_size": len(B),
            "seed": cfg.seed,
            "objective": "constant:m=1",
        }
        return Attribution(values=np.zeros(group.n), base_value=1.0, meta=meta)
    game = ListwiseGame(group, scorer, objective, B)
    attr = _run_estimator(game.value, game.n, background, cfg, mean_value_fn=game.mean_value)
    attr.meta["objective"] = objective.describe()
    attr.meta["query_id"] = group.query_id
    return attr


class _PointwiseGame:
    """Scalar coalition game on one document's model score."""

    def __init__(self, x: np.ndarray, scorer: Scorer, B: np.ndarray):
        self.x = np.asarray(x, dtype=float)
        self.scorer = scorer
        self.B = B
        self.n = len(self.x)

    def _values_for(self, visible, B: np.ndarray) -> np.ndarray:
        t = coalition_to_template(visible, self.n)
        return self.scorer.score_batch(np.where(t == 0, self.x[None, :], B))

    def value(self, visible, b: np.ndarray) -> float:
        return float(self._values_for(visible, np.asarray(b, dtype=float)[None, :])[0])

    def mean_value(self, visible) -> float:
        return float(self._values_for(visible, self.B).mean())


def pointwise_shap_explain(
    group: QueryGroup,
    scorer: Scorer,
    background: BackgroundSet | np.ndarray,
    cfg: EstimatorConfig,
    top_docs: int = 5,
) -> Attribution:
    """Mean of the pointwise score attributions of the top-ranked documents."""
    from .objectives import reference_ranking

    B = _background_array(background)
    order = reference_ranking(group, scorer)
    take = min(top_docs, len(group))
    values = np.zeros(group.n)
    base = 0.0
    for doc in order[:take]:
        game = _PointwiseGame(group.documents[int(doc)].features, scorer, B)
        attr = _run_estimator(game.value, game.n, background, cfg, mean_value_fn=game.mean_value)
        values += attr.values
        base += attr.base_value
    meta = {
        "estimator": f"pointwise-{cfg.kind}",
        "n_samples": cfg.n_samples,
        "background_size": len(B),
        "seed": cfg.seed,
        "top_docs": take,
        "query_id": group.query_id,
    }
    return Attribution(values=values / take, base_value=base / take, meta=meta)
