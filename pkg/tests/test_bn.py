from __future__ import annotations

import itertools
import math
import random
from collections import Counter

import numpy as np
import pytest

from v6scout.bn import (
    BayesNet,
    BnStructure,
    EvidenceError,
    InconsistentEvidenceError,
    fit_cpts,
    learn_structure,
    log_joint,
    posterior_marginals,
)
from v6scout.mining import KIND_EXACT, CodedAddress, SegmentCode, SegmentDictionary
from v6scout.segmentation import Segment

LN = math.log


def toy_dictionaries(domain_sizes: list[int]) -> list[SegmentDictionary]:
    """One single-nybble segment per node with the requested code counts."""
    dicts = []
    pos = 1
    for k, size in enumerate(domain_sizes):
        label = chr(ord("A") + k)
        codes = tuple(
            SegmentCode(f"{label}{i + 1}", KIND_EXACT, i, i, 1.0 / size, "closing")
            for i in range(size)
        )
        dicts.append(SegmentDictionary(Segment(label, pos, pos), codes))
        pos += 1
    return dicts


def coded_from_rows(rows, dicts) -> list[CodedAddress]:
    return [
        CodedAddress(tuple(dicts[k].codes[v].id for k, v in enumerate(row)))
        for row in rows
    ]


def copy_rows(n=1000):
    """Node 1 copies node 0; node 0 heavily skewed to value 0."""
    rows = []
    values = [0] * 850 + [1] * 50 + [2] * 50 + [3] * 50
    for v in values[:n]:
        rows.append((v, v))
    return rows


# ---------------------------------------------------------------------------
# independent oracle: literal enumeration of the joint
# ---------------------------------------------------------------------------


def brute_force_joint(net: BayesNet) -> np.ndarray:
    dims = [net.domain_size(k) for k in range(len(net.labels))]
    joint = np.zeros(dims)
    for assign in itertools.product(*(range(d) for d in dims)):
        p = 1.0
        for k, parents in enumerate(net.structure.parents):
            idx = tuple(assign[q] for q in parents) + (assign[k],)
            p *= float(net.cpts[k][idx])
        joint[assign] = p
    return joint


def brute_force_marginal(joint: np.ndarray, evidence: dict[int, int], k: int):
    sliced = joint
    for node, value in sorted(evidence.items(), reverse=True):
        sliced = np.take(sliced, value, axis=node)
    remaining = [n for n in range(joint.ndim) if n not in evidence]
    axis_of = {node: i for i, node in enumerate(remaining)}
    total = sliced.sum()
    if k in evidence:
        out = np.zeros(joint.shape[k])
        out[evidence[k]] = 1.0
        return out, total
    other_axes = tuple(a for n, a in axis_of.items() if n != k)
    return sliced.sum(axis=other_axes) / total, total


class TestLearnStructure:
    def test_single_segment_no_parents(self):
        dicts = toy_dictionaries([3])
        coded = coded_from_rows([(i % 3,) for i in range(60)], dicts)
        structure = learn_structure(coded, dicts)
        assert structure.parents == ((),)

    def test_copy_fixture_learns_the_edge(self):
        dicts = toy_dictionaries([4, 4])
        coded = coded_from_rows(copy_rows(), dicts)
        structure = learn_structure(coded, dicts)
        assert structure.parents == ((), (0,))
        assert structure.edges == [("A", "B")]

    def test_copy_fixture_bic_oracle(self):
        # direct computation of both candidate scores for node 1
        n = 1000
        counts0 = Counter(v for v, _ in copy_rows())
        ll_empty = sum(c * LN(c / n) for c in counts0.values())
        bic_empty = ll_empty - 0.5 * 3 * LN(n)
        bic_parent = 0.0 - 0.5 * 3 * 4 * LN(n)  # deterministic copy: LL = 0
        assert bic_parent > bic_empty

    def test_independent_uniform_segments_learn_nothing(self):
        rng = random.Random(5)
        dicts = toy_dictionaries([4, 4, 4])
        rows = [
            (rng.randrange(4), rng.randrange(4), rng.randrange(4))
            for _ in range(1000)
        ]
        structure = learn_structure(coded_from_rows(rows, dicts), dicts)
        assert structure.parents == ((), (), ())

    def test_parent_indices_always_earlier(self):
        rng = random.Random(11)
        dicts = toy_dictionaries([3, 3, 3, 3, 3])
        rows = []
        for _ in range(400):
            a = rng.randrange(3)
            rows.append((a, a, rng.randrange(3), a, rng.randrange(3)))
        structure = learn_structure(coded_from_rows(rows, dicts), dicts)
        for k, parents in enumerate(structure.parents):
            assert all(p < k for p in parents)

    def test_max_parents_respected(self):
        rng = random.Random(2)
        dicts = toy_dictionaries([2, 2, 2, 2])
        rows = []
        for _ in range(800):
            a, b, c = rng.randrange(2), rng.randrange(2), rng.randrange(2)
            rows.append((a, b, c, (a + b + c) % 2))
        structure = learn_structure(coded_from_rows(rows, dicts), dicts, max_parents=2)
        assert all(len(p) <= 2 for p in structure.parents)

    def test_structure_rejects_forward_parents(self):
        with pytest.raises(ValueError):
            BnStructure(labels=("A", "B"), parents=((1,), ()))


class TestFitCpts:
    def test_copy_fixture_closed_form(self):
        dicts = toy_dictionaries([4, 4])
        coded = coded_from_rows(copy_rows(), dicts)
        net = fit_cpts(coded, learn_structure(coded, dicts), dicts, alpha=0.5)
        # P(B=b | A=b) = (count + 0.5) / (count + 0.5 * 4)
        for a_val, count in ((0, 850), (1, 50), (2, 50), (3, 50)):
            expected = (count + 0.5) / (count + 2.0)
            assert net.cpts[1][a_val, a_val] == pytest.approx(expected, abs=1e-12)
        assert net.cpts[1][0, 0] >= 0.998

    def test_unseen_parent_combination_uniform(self):
        dicts = toy_dictionaries([3, 3])
        # parent value 2 never occurs
        rows = [(i % 2, i % 2) for i in range(100)]
        coded = coded_from_rows(rows, dicts)
        structure = BnStructure(labels=("A", "B"), parents=((), (0,)))
        net = fit_cpts(coded, structure, dicts, alpha=0.5)
        assert np.allclose(net.cpts[1][2], [1 / 3] * 3)

    def test_alpha_zero_is_maximum_likelihood(self):
        dicts = toy_dictionaries([2, 2])
        rows = [(0, 0)] * 30 + [(0, 1)] * 10 + [(1, 1)] * 60
        coded = coded_from_rows(rows, dicts)
        structure = BnStructure(labels=("A", "B"), parents=((), (0,)))
        net = fit_cpts(coded, structure, dicts, alpha=0.0)
        assert net.cpts[1][0, 0] == pytest.approx(0.75)
        assert net.cpts[1][1, 1] == pytest.approx(1.0)

    def test_rows_sum_to_one(self, copy_model):
        for cpt in copy_model.net.cpts:
            rows = cpt.reshape(-1, cpt.shape[-1])
            assert np.allclose(rows.sum(axis=1), 1.0, atol=1e-9)
            assert (rows > 0).all()


def random_net(rng: random.Random, n_nodes=4, max_codes=4, n_rows=200) -> BayesNet:
    dicts = toy_dictionaries([rng.randint(2, max_codes) for _ in range(n_nodes)])
    rows = []
    for _ in range(n_rows):
        row = []
        for k, dic in enumerate(dicts):
            size = len(dic.codes)
            if row and rng.random() < 0.5:
                row.append((row[-1] + rng.randrange(2)) % size)
            else:
                row.append(rng.randrange(size))
        rows.append(tuple(row))
    coded = coded_from_rows(rows, dicts)
    structure = learn_structure(coded, dicts)
    return fit_cpts(coded, structure, dicts, alpha=0.5)


class TestInference:
    def test_empty_evidence_matches_bruteforce(self):
        net = random_net(random.Random(0))
        joint = brute_force_joint(net)
        marginals = posterior_marginals(net)
        for k, label in enumerate(net.labels):
            expected, _ = brute_force_marginal(joint, {}, k)
            got = [marginals[label][cid] for cid in net.code_ids[k]]
            assert np.allclose(got, expected, atol=1e-9)

    def test_evidence_matches_bruteforce(self):
        rng = random.Random(1)
        net = random_net(rng)
        joint = brute_force_joint(net)
        for _ in range(25):
            evidence_nodes = rng.sample(range(len(net.labels)), rng.randint(1, 2))
            ev = {k: rng.randrange(net.domain_size(k)) for k in evidence_nodes}
            ev_labels = {
                net.labels[k]: net.code_ids[k][v] for k, v in ev.items()
            }
            marginals = posterior_marginals(net, ev_labels)
            for k, label in enumerate(net.labels):
                expected, _ = brute_force_marginal(joint, ev, k)
                got = [marginals[label][cid] for cid in net.code_ids[k]]
                assert np.allclose(got, expected, atol=1e-9)

    def test_full_evidence_point_masses(self):
        net = random_net(random.Random(2))
        ev = {label: net.code_ids[k][0] for k, label in enumerate(net.labels)}
        marginals = posterior_marginals(net, ev)
        for k, label in enumerate(net.labels):
            assert marginals[label][net.code_ids[k][0]] == 1.0
            assert sum(marginals[label].values()) == pytest.approx(1.0)

    def test_backwards_flow_on_copy_fixture(self):
        dicts = toy_dictionaries([4, 4])
        coded = coded_from_rows(copy_rows(), dicts)
        net = fit_cpts(coded, learn_structure(coded, dicts), dicts, alpha=0.5)
        marginals = posterior_marginals(net, {"B": "B3"})
        assert marginals["A"]["A3"] > 0.95  # child observation pins the parent

    def test_unknown_evidence_label(self):
        net = random_net(random.Random(3))
        with pytest.raises(EvidenceError) as err:
            posterior_marginals(net, {"Z": "Z1"})
        assert net.labels == err.value.valid

    def test_unknown_evidence_code(self):
        net = random_net(random.Random(4))
        with pytest.raises(EvidenceError):
            posterior_marginals(net, {"A": "A999"})

    def test_inconsistent_evidence_with_unsmoothed_model(self):
        dicts = toy_dictionaries([2, 2])
        rows = [(0, 0)] * 50 + [(1, 1)] * 50
        coded = coded_from_rows(rows, dicts)
        structure = BnStructure(labels=("A", "B"), parents=((), (0,)))
        net = fit_cpts(coded, structure, dicts, alpha=0.0)
        with pytest.raises(InconsistentEvidenceError):
            posterior_marginals(net, {"A": "A1", "B": "B2"})  # P = 0 exactly

    def test_prior_marginals_approach_empirical_frequencies(self):
        rng = random.Random(9)
        dicts = toy_dictionaries([4, 4, 4])
        rows = []
        for _ in range(10_000):
            a = rng.choices(range(4), weights=[8, 4, 2, 1])[0]
            b = (a + rng.randrange(2)) % 4
            c = rng.randrange(4)
            rows.append((a, b, c))
        coded = coded_from_rows(rows, dicts)
        net = fit_cpts(coded, learn_structure(coded, dicts), dicts, alpha=0.5)
        marginals = posterior_marginals(net)
        empirical = [Counter(r[k] for r in rows) for k in range(3)]
        for k, label in enumerate(net.labels):
            for i, cid in enumerate(net.code_ids[k]):
                assert abs(
                    marginals[label][cid] - empirical[k][i] / 10_000
                ) <= 0.02


class TestLogJoint:
    def test_matches_direct_product(self):
        net = random_net(random.Random(6))
        rng = random.Random(7)
        for _ in range(20):
            assign = [rng.randrange(net.domain_size(k)) for k in range(len(net.labels))]
            coded = CodedAddress(
                tuple(net.code_ids[k][v] for k, v in enumerate(assign))
            )
            expected = 1.0
            for k, parents in enumerate(net.structure.parents):
                idx = tuple(assign[q] for q in parents) + (assign[k],)
                expected *= float(net.cpts[k][idx])
            assert log_joint(net, coded) == pytest.approx(LN(expected), abs=1e-9)

    def test_always_finite_when_smoothed(self):
        net = random_net(random.Random(8))
        worst = CodedAddress(tuple(ids[-1] for ids in net.code_ids))
        assert math.isfinite(log_joint(net, worst))
