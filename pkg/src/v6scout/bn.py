"""Order-constrained Bayesian network over coded segments.

Nodes follow address order and a node may only have earlier nodes as
parents, so the graph is acyclic by construction and the network score
decomposes per node. Structure search is exhaustive over parent subsets
up to ``max_parents``, scored with BIC (log-likelihood minus
(r/2) * log N, r = free parameters). Parameters are additive-smoothed
conditional probability tables, so every probability is strictly
positive and any code combination remains generable.

Queries are answered exactly. Factors are numpy arrays indexed by node;
variable elimination sums nuisance nodes out of the product of CPT
factors, letting influence flow both along and against edge direction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .mining import CodedAddress, SegmentDictionary


class EvidenceError(ValueError):
    """Evidence referencing labels or code ids absent from the model."""

    def __init__(self, message: str, valid: Sequence[str] = ()):
        super().__init__(message)
        self.valid = tuple(valid)


class InconsistentEvidenceError(ValueError):
    """Evidence whose prior probability under the model is zero."""


@dataclass(frozen=True)
class BnStructure:
    """Per-node parent sets; every parent index precedes its child."""

    labels: tuple[str, ...]
    parents: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        for k, ps in enumerate(self.parents):
            if any(p >= k or p < 0 for p in ps):
                raise ValueError(f"node {k} has a non-earlier parent in {ps}")

    @property
    def edges(self) -> list[tuple[str, str]]:
        return [
            (self.labels[p], self.labels[k])
            for k, ps in enumerate(self.parents)
            for p in ps
        ]


@dataclass(frozen=True)
class BayesNet:
    """Fitted network: structure plus one smoothed CPT per node.

    ``cpts[k]`` has shape (*parent domain sizes, own domain size); rows
    along the last axis sum to 1. ``code_ids[k]`` orders node k's domain.
    """

    structure: BnStructure
    code_ids: tuple[tuple[str, ...], ...]
    cpts: tuple[np.ndarray, ...]
    alpha: float

    @property
    def labels(self) -> tuple[str, ...]:
        return self.structure.labels

    def node_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise EvidenceError(
                f"unknown segment label {label!r}", valid=self.labels
            ) from None

    def domain_size(self, k: int) -> int:
        return len(self.code_ids[k])

    def code_position(self, k: int, code_id: str) -> int:
        try:
            return self.code_ids[k].index(code_id)
        except ValueError:
            raise EvidenceError(
                f"unknown code {code_id!r} for segment {self.labels[k]!r}",
                valid=self.code_ids[k],
            ) from None

    def evidence_indices(self, evidence: Mapping[str, str] | None) -> dict[int, int]:
        """Validate a label->code-id mapping into node->domain-index form."""
        out: dict[int, int] = {}
        for label, code_id in (evidence or {}).items():
            k = self.node_index(label)
            out[k] = self.code_position(k, code_id)
        return out


def _coded_matrix(
    coded: Sequence[CodedAddress], code_ids: Sequence[Sequence[str]]
) -> np.ndarray:
    if not coded:
        raise ValueError("no coded addresses")
    lookup = [{cid: i for i, cid in enumerate(ids)} for ids in code_ids]
    rows = []
    for ca in coded:
        if len(ca.ids) != len(code_ids):
            raise ValueError("coded address length does not match segment count")
        rows.append([lookup[k][cid] for k, cid in enumerate(ca.ids)])
    return np.asarray(rows, dtype=np.int64)


def _family_counts(
    data: np.ndarray, k: int, parents: tuple[int, ...], dims: Sequence[int]
) -> np.ndarray:
    """Count table of shape (prod parent dims, own dim)."""
    own = dims[k]
    if not parents:
        return np.bincount(data[:, k], minlength=own).reshape(1, own).astype(float)
    pdims = [dims[p] for p in parents]
    flat = np.zeros(len(data), dtype=np.int64)
    for p, pd in zip(parents, pdims):
        flat = flat * pd + data[:, p]
    flat = flat * own + data[:, k]
    counts = np.bincount(flat, minlength=int(np.prod(pdims)) * own)
    return counts.reshape(-1, own).astype(float)


def _bic(counts: np.ndarray, n: int, own_dim: int) -> float:
    row_totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ll_terms = np.where(counts > 0, counts * np.log(counts / row_totals), 0.0)
    ll = float(ll_terms.sum())
    free = (own_dim - 1) * counts.shape[0]
    return ll - 0.5 * free * math.log(n)


def learn_structure(
    coded: Sequence[CodedAddress],
    dictionaries: Sequence[SegmentDictionary],
    max_parents: int = 2,
) -> BnStructure:
    """Pick, per node, the BIC-best parent subset among earlier nodes.

    Ties go to fewer parents, then to the lexicographically smallest
    subset, which the search order guarantees.
    """
    code_ids = tuple(tuple(c.id for c in d.codes) for d in dictionaries)
    labels = tuple(d.segment.label for d in dictionaries)
    data = _coded_matrix(coded, code_ids)
    n = len(data)
    dims = [len(ids) for ids in code_ids]
    chosen: list[tuple[int, ...]] = []
    for k in range(len(dims)):
        best_set: tuple[int, ...] = ()
        best_score = _bic(_family_counts(data, k, (), dims), n, dims[k])
        for size in range(1, max_parents + 1):
            for subset in itertools.combinations(range(k), size):
                score = _bic(_family_counts(data, k, subset, dims), n, dims[k])
                if score > best_score:
                    best_score = score
                    best_set = subset
        chosen.append(best_set)
    return BnStructure(labels=labels, parents=tuple(chosen))


def fit_cpts(
    coded: Sequence[CodedAddress],
    structure: BnStructure,
    dictionaries: Sequence[SegmentDictionary],
    alpha: float = 0.5,
) -> BayesNet:
    """Estimate CPTs with additive smoothing ``alpha`` per cell.

    alpha=0 gives maximum-likelihood rows; parent combinations never
    observed then fall back to uniform rows.
    """
    code_ids = tuple(tuple(c.id for c in d.codes) for d in dictionaries)
    data = _coded_matrix(coded, code_ids)
    dims = [len(ids) for ids in code_ids]
    cpts = []
    for k, parents in enumerate(structure.parents):
        counts = _family_counts(data, k, parents, dims)
        own = dims[k]
        totals = counts.sum(axis=1, keepdims=True)
        smoothed = counts + alpha
        denom = totals + alpha * own
        with np.errstate(divide="ignore", invalid="ignore"):
            table = np.where(denom > 0, smoothed / denom, 1.0 / own)
        shape = [dims[p] for p in parents] + [own]
        cpts.append(table.reshape(shape))
    return BayesNet(
        structure=structure, code_ids=code_ids, cpts=tuple(cpts), alpha=alpha
    )


# ---------------------------------------------------------------------------
# Exact inference
# ---------------------------------------------------------------------------


def _factors(net: BayesNet, evidence: Mapping[int, int]) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """CPT factors with evidence nodes sliced down to their observed value."""
    out = []
    for k, parents in enumerate(net.structure.parents):
        variables = tuple(parents) + (k,)
        table = net.cpts[k]
        kept = []
        for axis_var in variables:
            if axis_var in evidence:
                idx = [slice(None)] * len(kept) + [evidence[axis_var]]
                table = table[tuple(idx)]
            else:
                kept.append(axis_var)
        out.append((tuple(kept), np.asarray(table, dtype=float)))
    return out


_SUBSCRIPTS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _contract(
    parts: list[tuple[tuple[int, ...], np.ndarray]], out_vars: tuple[int, ...]
) -> np.ndarray:
    """Multiply factors pairwise and sum everything not in ``out_vars``."""
    letter = {}
    for vs, _ in parts:
        for v in vs:
            letter.setdefault(v, _SUBSCRIPTS[len(letter)])
    for v in out_vars:
        letter.setdefault(v, _SUBSCRIPTS[len(letter)])
    acc_vars: tuple[int, ...] = ()
    acc = np.array(1.0)
    for i, (vs, table) in enumerate(parts):
        remaining = {v for later_vs, _ in parts[i + 1 :] for v in later_vs}
        target = tuple(
            v
            for v in sorted(set(acc_vars) | set(vs))
            if v in remaining or v in out_vars
        )
        spec = (
            "".join(letter[v] for v in acc_vars)
            + ","
            + "".join(letter[v] for v in vs)
            + "->"
            + "".join(letter[v] for v in target)
        )
        acc = np.einsum(spec, acc, table)
        acc_vars = target
    if acc_vars != out_vars:
        spec = (
            "".join(letter[v] for v in acc_vars)
            + "->"
            + "".join(letter[v] for v in out_vars)
        )
        acc = np.einsum(spec, acc)
    return acc


def _eliminate_to(
    factors: list[tuple[tuple[int, ...], np.ndarray]], keep: tuple[int, ...]
) -> np.ndarray:
    """Sum all variables not in ``keep`` out of the factor product.

    Classic variable elimination: nuisance variables go one at a time,
    each contraction touching only the factors that mention it.
    """
    work = list(factors)
    nuisance = sorted({v for vs, _ in work for v in vs} - set(keep))
    for var in nuisance:
        involved = [(vs, t) for vs, t in work if var in vs]
        work = [(vs, t) for vs, t in work if var not in vs]
        out_vars = tuple(sorted({v for vs, _ in involved for v in vs} - {var}))
        work.append((out_vars, _contract(involved, out_vars)))
    return _contract(work, keep)


def posterior_marginals(
    net: BayesNet, evidence: Mapping[str, str] | None = None
) -> dict[str, dict[str, float]]:
    """Exact posterior marginal over every segment's codes given evidence.

    Evidence segments come back as point masses. Raises
    InconsistentEvidenceError when the evidence has zero prior
    probability (possible only for unsmoothed models).
    """
    ev = net.evidence_indices(evidence)
    factors = _factors(net, ev)
    normaliser = float(_eliminate_to(factors, ()))
    if not normaliser > 0 or not math.isfinite(normaliser):
        raise InconsistentEvidenceError(
            "evidence has zero probability under the model"
        )
    result: dict[str, dict[str, float]] = {}
    for k, label in enumerate(net.labels):
        ids = net.code_ids[k]
        if k in ev:
            probs = np.zeros(len(ids))
            probs[ev[k]] = 1.0
        else:
            probs = _eliminate_to(factors, (k,)) / normaliser
        result[label] = {cid: float(p) for cid, p in zip(ids, probs)}
    return result


def conditional_distribution(
    net: BayesNet, assignment: Mapping[int, int], k: int
) -> np.ndarray:
    """P(X_k | assignment) with all other nodes marginalised out."""
    reduced = {node: idx for node, idx in assignment.items() if node != k}
    factors = _factors(net, reduced)
    joint = _eliminate_to(factors, (k,))
    total = float(joint.sum())
    if not total > 0 or not math.isfinite(total):
        raise InconsistentEvidenceError(
            "assignment has zero probability under the model"
        )
    return joint / total


def log_joint(net: BayesNet, coded: CodedAddress) -> float:
    """Log probability of a complete code vector under the network."""
    if len(coded.ids) != len(net.labels):
        raise ValueError("coded address length does not match the network")
    indices = [net.code_position(k, cid) for k, cid in enumerate(coded.ids)]
    total = 0.0
    for k, parents in enumerate(net.structure.parents):
        idx = tuple(indices[p] for p in parents) + (indices[k],)
        total += math.log(float(net.cpts[k][idx]))
    return total
