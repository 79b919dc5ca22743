import numpy as np
import pytest

from hyplap.functional import Labeling, ScaleError, eval_FH, find_certificate, verify_stationarity
from hyplap.hgraph import Hypergraph
from hyplap.oracle import (
    check_lemma_maxmin,
    check_proposition_D,
    compute_D,
    minimize_FH_oracle,
    verify_instance,
)
from hyplap.solver import solve_AE_p2
from helpers import H1_MINIMIZER, H2_SOLUTION, h1, h1_labels, h2, h2_labels, random_connected

TRIPLE = Hypergraph(3, [(1.0, [0, 1, 2])])
TRIPLE_L = Labeling({0: 0.0, 2: 1.0})


@pytest.fixture(scope="module")
def h1_oracle():
    return minimize_FH_oracle(h1(), h1_labels(), 2.0, iters=1_000_000, seed=0)


@pytest.fixture(scope="module")
def h2_oracle():
    return minimize_FH_oracle(h2(), h2_labels(), 2.0, iters=1_000_000, seed=0)


def test_oracle_h1(h1_oracle):
    assert eval_FH(h1(), h1_oracle, 2) == pytest.approx(9.0, abs=1e-3)
    assert h1_oracle[1] == pytest.approx(2.5, abs=1e-3)
    assert h1_oracle[3] == pytest.approx(2.5, abs=1e-3)


def test_oracle_h2(h2_oracle):
    assert eval_FH(h2(), h2_oracle, 2) == pytest.approx(3.0, abs=1e-3)
    D = compute_D(h2(), h2_oracle, h2_labels())
    idx = sorted(D.members)
    np.testing.assert_allclose(h2_oracle[idx], H2_SOLUTION[idx], atol=1e-3)


def test_oracle_equal_labels():
    u = minimize_FH_oracle(h1(), Labeling({0: 1.0, 5: 1.0}), iters=100)
    np.testing.assert_array_equal(u, np.ones(6))


def test_oracle_scale_guard():
    H = Hypergraph(60, [(1.0, [i, i + 1]) for i in range(59)])
    with pytest.raises(ScaleError):
        minimize_FH_oracle(H, Labeling({0: 0.0, 59: 1.0}), iters=10)
    with pytest.raises(ScaleError):
        verify_instance(H, Labeling({0: 0.0, 59: 1.0}), iters=10)


def test_compute_D_examples():
    D = compute_D(h1(), H1_MINIMIZER, h1_labels())
    assert D.members == frozenset(range(6))
    D = compute_D(TRIPLE, np.array([0.0, 0.5, 1.0]), TRIPLE_L)
    assert D.members == frozenset({0, 2})
    full = Labeling({i: float(i) for i in range(6)})
    assert compute_D(h1(), np.arange(6.0), full).members == frozenset(range(6))
    with pytest.raises(ValueError):
        compute_D(h1(), H1_MINIMIZER, h1_labels(), eps=0.0)


def test_compute_D_h2():
    # x3 and x6 sit strictly inside the range of their only hyperedge.
    D = compute_D(h2(), H2_SOLUTION, h2_labels())
    assert D.members == frozenset({0, 1, 3, 4, 6})


def test_D_witnesses():
    D = compute_D(h1(), H1_MINIMIZER, h1_labels())
    assert D.labeled <= D.members
    assert set(D.witnesses) == set(D.members - D.labeled)
    # x2 is the max of e2 and the min of e1; x4 is the max of e2 and the min of e3/e4.
    assert D.witnesses[1] == (1, 0)
    assert D.witnesses[3][0] == 1 and D.witnesses[3][1] in (2, 3)
    assert all(g == (0.0, 0.0) for g in D.gaps.values())


def test_lemma_maxmin_examples(h1_oracle):
    u2 = minimize_FH_oracle(h1(), h1_labels(), 2.0, iters=1_000_000, seed=1)
    assert check_lemma_maxmin(h1(), h1_oracle, u2, 1e-3)
    assert check_lemma_maxmin(h1(), h1_oracle, h1_oracle, 0.0)
    v = H1_MINIMIZER.copy()
    v[1] += 1.0  # x2 is the max of e2
    assert not check_lemma_maxmin(h1(), H1_MINIMIZER, v, 1e-3)


def test_proposition_D_examples():
    assert check_proposition_D(h1(), h1_labels(), seeds=(0, 1, 2), iters=1_000_000)
    res = verify_instance(TRIPLE, TRIPLE_L, seeds=(0, 1, 2), iters=100_000)
    assert res["proposition_D"]
    assert all(d["D"] == [0, 2] for d in res["D"])
    full = Labeling({i: float(i % 3) for i in range(6)})
    assert check_proposition_D(h1(), full, seeds=(0, 1), iters=10)


def test_oracle_minimizer_has_certificate(h1_oracle, h2_oracle):
    for H, L, u in ((h1(), h1_labels(), h1_oracle), (h2(), h2_labels(), h2_oracle)):
        u = L.impose(u.copy())
        C = find_certificate(H, u, 2.0, L, tol=1e-3, face_tol=1e-3)
        assert C is not None
        assert verify_stationarity(H, u, 2.0, L, C, tol=1e-3) <= 1e-3


def test_coincidence_on_h2_not_on_h1(h1_oracle, h2_oracle):
    u2, _ = solve_AE_p2(h2(), h2_labels())
    D = sorted(compute_D(h2(), h2_oracle, h2_labels()).members)
    np.testing.assert_allclose(h2_oracle[D], u2[D], atol=1e-3)
    u1, _ = solve_AE_p2(h1(), h1_labels())
    assert abs(h1_oracle[1] - u1[1]) == pytest.approx(0.5, abs=1e-3)


def test_verify_instance_json_shape():
    rng = np.random.default_rng(4)
    H = random_connected(rng, 8, max_size=4)
    L = Labeling({0: 0.0, 5: 1.0, 7: 0.5})
    res = verify_instance(H, L, seeds=(3, 4), iters=200_000)
    assert set(res) == {"seeds", "objective", "minimizers", "D", "lemma_maxmin", "lemma_witnesses", "proposition_D"}
    assert len(res["minimizers"]) == 2 and len(res["minimizers"][0]) == 8


def test_floating_constant_hyperedge_breaks_extremum_uniqueness():
    # e0 = {0,1,2} has range 1 under any labeling-consistent u, so F >= 1, and
    # u = (0, t, 1, t) attains F = 1 for every t in [0, 1]. The unlabeled
    # hyperedge {1,3} is constant at a free level: its max and min, and the
    # values on D, are not unique across minimizers.
    H = Hypergraph(4, [(1.0, [0, 1, 2]), (1.0, [1, 3])])
    L = Labeling({0: 0.0, 2: 1.0})
    a = np.array([0.0, 0.25, 1.0, 0.25])
    b = np.array([0.0, 0.75, 1.0, 0.75])
    assert eval_FH(H, a, 2) == eval_FH(H, b, 2) == 1.0
    assert not check_lemma_maxmin(H, a, b, 1e-3)
    Da, Db = compute_D(H, a, L), compute_D(H, b, L)
    assert Da.members == Db.members == frozenset(range(4))
