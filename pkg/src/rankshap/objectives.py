"""Listwise explanation objectives and the masked value function.

An objective reduces a perturbed ranking to one scalar similarity against the
model's unperturbed reference ranking. All variants take their maximum 1.0 at
the reference permutation, so attribution signs are comparable across them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .data import BackgroundSet, QueryGroup
from .errors import DimensionError
from .masking import coalition_to_template, masked_matrix
from .rankers import Scorer, rank, rank_many


def _check_perm_pair(pi_ref, pi) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.asarray(pi_ref, dtype=int), np.asarray(pi, dtype=int)
    if a.shape != b.shape:
        raise DimensionError(f"permutation lengths differ: {a.shape} vs {b.shape}")
    return a, b


def _ranks_of(perm: np.ndarray) -> np.ndarray:
    """Position of each doc in the permutation (inverse permutation)."""
    return np.argsort(perm)


def kendall_tau(pi_ref, pi) -> float:
    """Kendall's tau-a over all document pairs (permutations are tie-free)."""
    a, b = _check_perm_pair(pi_ref, pi)
    m = len(a)
    if m < 2:
        raise ValueError("kendall_tau needs at least 2 documents")
    ra, rb = _ranks_of(a), _ranks_of(b)
    iu, ju = np.triu_indices(m, k=1)
    s = np.sign(ra[iu] - ra[ju]) * np.sign(rb[iu] - rb[ju])
    return float(s.sum() / len(s))


def subset_tau(pi_ref, pi, docs: Iterable[int]) -> float:
    """Tau restricted to pairs with at least one member in `docs`."""
    a, b = _check_perm_pair(pi_ref, pi)
    m = len(a)
    if m < 2:
        raise ValueError("subset_tau needs at least 2 documents")
    members = np.zeros(m, dtype=bool)
    idx = np.fromiter(docs, dtype=int)
    if idx.size == 0:
        raise ValueError("document subset must be non-empty")
    if idx.min() < 0 or idx.max() >= m:
        raise ValueError(f"document index out of range for m={m}")
    members[idx] = True
    ra, rb = _ranks_of(a), _ranks_of(b)
    iu, ju = np.triu_indices(m, k=1)
    keep = members[iu] | members[ju]
    s = np.sign(ra[iu[keep]] - ra[ju[keep]]) * np.sign(rb[iu[keep]] - rb[ju[keep]])
    return float(s.sum() / len(s))


def topk_tau(pi_ref, pi, k: int) -> float:
    """Tau over pairs touching the top-k documents of the reference ranking."""
    a, _ = _check_perm_pair(pi_ref, pi)
    if not 1 <= k <= len(a):
        raise ValueError(f"k must be in [1, {len(a)}], got {k}")
    return subset_tau(pi_ref, pi, a[:k])


def doc_rank_distance(pi_ref, pi, j: int) -> float:
    """1 - |rank shift of doc j| / (m-1); 1 means position preserved."""
    a, b = _check_perm_pair(pi_ref, pi)
    m = len(a)
    if m < 2:
        raise ValueError("doc_rank_distance needs at least 2 documents")
    if not 0 <= j < m:
        raise ValueError(f"doc index {j} out of range for m={m}")
    return 1.0 - abs(int(_ranks_of(b)[j]) - int(_ranks_of(a)[j])) / (m - 1)


class ListwiseObjective:
    """Base: holds the reference permutation and reduces rankings to scalars."""

    def __init__(self, reference):
        self.reference = np.asarray(reference, dtype=int)
        self.reference.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.reference)

    def evaluate(self, pi) -> float:
        raise NotImplementedError

    def evaluate_many(self, perms: np.ndarray) -> np.ndarray:
        """Evaluate a (k, m) batch of permutations; default loops."""
        return np.array([self.evaluate(p) for p in perms])

    def describe(self) -> str:
        raise NotImplementedError


class _PairTauObjective(ListwiseObjective):
    """Shared machinery for tau over a fixed subset of document pairs."""

    def _init_pairs(self, keep: np.ndarray | None):
        iu, ju = np.triu_indices(self.m, k=1)
        if keep is not None:
            iu, ju = iu[keep], ju[keep]
        self._iu, self._ju = iu, ju
        r = _ranks_of(self.reference)
        self._s_ref = np.sign(r[iu] - r[ju])

    def evaluate(self, pi) -> float:
        return float(self.evaluate_many(np.asarray(pi, dtype=int)[None, :])[0])

    def evaluate_many(self, perms: np.ndarray) -> np.ndarray:
        perms = np.asarray(perms, dtype=int)
        if perms.shape[1] != self.m:
            raise DimensionError(f"permutation length {perms.shape[1]} != {self.m}")
        ranks = np.argsort(perms, axis=1)
        s = np.sign(ranks[:, self._iu] - ranks[:, self._ju])
        return (s @ self._s_ref) / len(self._s_ref)


class KendallTauObjective(_PairTauObjective):
    def __init__(self, reference):
        super().__init__(reference)
        if self.m < 2:
            raise ValueError("objective needs at least 2 documents")
        self._init_pairs(None)

    def describe(self) -> str:
        return "kendall"


class TopKTauObjective(_PairTauObjective):
    """Tau over pairs touching a document subset (top-k of the reference by default)."""

    def __init__(self, reference, k: int | None = None, docs: Iterable[int] | None = None):
        super().__init__(reference)
        if self.m < 2:
            raise ValueError("objective needs at least 2 documents")
        if (k is None) == (docs is None):
            raise ValueError("give exactly one of k or docs")
        if k is not None:
            if not 1 <= k <= self.m:
                raise ValueError(f"k must be in [1, {self.m}], got {k}")
            docs = self.reference[:k]
            self._label = f"topk:{k}"
        else:
            docs = np.fromiter(docs, dtype=int)
            if docs.size == 0 or docs.min() < 0 or docs.max() >= self.m:
                raise ValueError("invalid document subset")
            self._label = "group:" + ",".join(str(d) for d in sorted(set(docs.tolist())))
        members = np.zeros(self.m, dtype=bool)
        members[np.asarray(docs, dtype=int)] = True
        iu, ju = np.triu_indices(self.m, k=1)
        self._init_pairs(members[iu] | members[ju])

    def describe(self) -> str:
        return self._label


class DocRankObjective(ListwiseObjective):
    """Similarity of one document's rank to its reference position, in [0,1]."""

    def __init__(self, reference, target_doc: int):
        super().__init__(reference)
        if self.m < 2:
            raise ValueError("objective needs at least 2 documents")
        if not 0 <= target_doc < self.m:
            raise ValueError(f"doc index {target_doc} out of range for m={self.m}")
        self.target_doc = target_doc
        self._ref_rank = int(_ranks_of(self.reference)[target_doc])

    def evaluate(self, pi) -> float:
        return float(self.evaluate_many(np.asarray(pi, dtype=int)[None, :])[0])

    def evaluate_many(self, perms: np.ndarray) -> np.ndarray:
        perms = np.asarray(perms, dtype=int)
        if perms.shape[1] != self.m:
            raise DimensionError(f"permutation length {perms.shape[1]} != {self.m}")
        ranks = np.argsort(perms, axis=1)[:, self.target_doc]
        return 1.0 - np.abs(ranks - self._ref_rank) / (self.m - 1)

    def describe(self) -> str:
        return f"docrank:{self.target_doc}"


def reference_ranking(group: QueryGroup, scorer: Scorer) -> np.ndarray:
    """The model's unperturbed ranking of the group."""
    return rank(scorer.score_batch(group.feature_matrix()))


def make_objective(spec: str, reference) -> ListwiseObjective:
    """Parse `kendall`, `topk:<k>`, `docrank:<j>`, or `group:<i,j,...>`."""
    spec = spec.strip()
    if spec == "kendall":
        return KendallTauObjective(reference)
    head, _, arg = spec.partition(":")
    try:
        if head == "topk":
            return TopKTauObjective(reference, k=int(arg))
        if head == "docrank":
            return DocRankObjective(reference, int(arg))
        if head == "group":
            return TopKTauObjective(reference, docs=[int(x) for x in arg.split(",")])
    except ValueError as exc:
        raise ValueError(f"bad objective spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown objective spec {spec!r}")


def value_function(
    group: QueryGroup,
    scorer: Scorer,
    objective: ListwiseObjective,
    t: np.ndarray,
    b: np.ndarray,
) -> float:
    """Similarity of the masked group's ranking to the reference ranking."""
    perturbed = masked_matrix(group.feature_matrix(), t, b)
    return objective.evaluate(rank(scorer.score_batch(perturbed)))


class ListwiseGame:
    """Coalition game for one query: v(S, b) with vectorized background means.

    `value` follows the masked-rank-reduce pipeline exactly; `mean_value`
    evaluates all background rows in one scorer batch.
    """

    def __init__(self, group: QueryGroup, scorer: Scorer, objective: ListwiseObjective,
                 background: BackgroundSet | np.ndarray):
        self.X = group.feature_matrix()
        self.scorer = scorer
        self.objective = objective
        self.background = np.asarray(getattr(background, "vectors", background), dtype=float)
        if self.background.shape[1] != self.X.shape[1]:
            raise DimensionError(
                f"background dim {self.background.shape[1]} != feature dim {self.X.shape[1]}"
            )
        self.n = self.X.shape[1]
        self.m = self.X.shape[0]

    def _values_for(self, visible, B: np.ndarray) -> np.ndarray:
        t = coalition_to_template(visible, self.n)
        k = B.shape[0]
        # (k, m, n): each background row masks the whole group identically.
        masked = np.where(t == 0, self.X[None, :, :], B[:, None, :])
        scores = self.scorer.score_batch(masked.reshape(k * self.m, self.n))
        perms = rank_many(scores.reshape(k, self.m))
        return self.objective.evaluate_many(perms)

    def value(self, visible, b: np.ndarray) -> float:
        return float(self._values_for(visible, np.asarray(b, dtype=float)[None, :])[0])

    def values_over_background(self, visible) -> np.ndarray:
        return self._values_for(visible, self.background)

    def mean_value(self, visible) -> float:
        return float(self.values_over_background(visible).mean())
