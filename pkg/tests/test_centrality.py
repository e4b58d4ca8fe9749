import numpy as np
import pytest

import connod as cn
from connod.centrality import (
    PerturbationInputs,
    pinv_psd,
    sign_invariant_error,
)
from connod.errors import ValidationError


def perturbed_node1(g, rho):
    """Exact effective adjacency when only node 1's alignment drops to rho."""
    a = g.adjacency.copy()
    a[0, 1:] *= rho
    a[1:, 0] *= rho
    return cn.Graph(a)


def exact_vector(g, rho):
    return cn.dominant_eigenpair(perturbed_node1(g, rho)).vector


# ---------------------------------------------------------------------------
# Lemma-1 style first-order perturbation

def test_two_node_uniform_perturbation():
    k = np.array([[0.0, 1.0], [1.0, 0.0]])
    v = np.array([1.0, 1.0]) / np.sqrt(2)
    lam, vec = cn.eigenpair_perturbation(PerturbationInputs(k, k, 1.0, v), 0.3)
    assert lam == pytest.approx(1.3, abs=1e-12)
    assert np.allclose(vec, v, atol=1e-12)


def test_zero_perturbation_is_identity():
    g = cn.ring(5)
    ep = cn.dominant_eigenpair(g)
    lam, vec = cn.eigenpair_perturbation(
        PerturbationInputs(g.adjacency, np.zeros((5, 5)), ep.value, ep.vector), 0.2
    )
    assert lam == pytest.approx(ep.value, abs=1e-14)
    assert np.allclose(vec, ep.vector, atol=1e-14)


def test_ring_perturbation_second_order_error():
    g = cn.ring(6)
    kp = np.zeros((6, 6))
    kp[0, 1] = kp[1, 0] = kp[0, 5] = kp[5, 0] = 1.0
    ep = cn.dominant_eigenpair(g)
    errs = {}
    for delta in (-0.1, -0.05):
        _, vec = cn.eigenpair_perturbation(
            PerturbationInputs(g.adjacency, kp, ep.value, ep.vector), delta
        )
        errs[delta] = sign_invariant_error(vec, exact_vector(g, 1 + delta))
    assert 3.0 <= errs[-0.1] / errs[-0.05] <= 5.0


def test_perturbation_validates_eigenpair():
    g = cn.ring(4)
    with pytest.raises(ValidationError):
        cn.eigenpair_perturbation(
            PerturbationInputs(g.adjacency, np.zeros((4, 4)), 3.0, np.ones(4) / 2.0), 0.1
        )


# ---------------------------------------------------------------------------
# closed forms

def test_regular_ring4_first_entry_vector():
    g = cn.ring(4)
    a = g.adjacency
    mutual = (a @ a)[0, 1:]
    assert np.array_equal(np.concatenate(([-2.0], mutual)), [-2, 0, 2, 0])
    delta = -0.1
    approx = cn.regular_approx(g, 1 + delta)
    expected = np.ones(4) - (delta / 2) * np.array([-1, 0, 1, 0])
    assert np.allclose(approx, expected, atol=1e-12)


def test_ring5_mutual_neighbors():
    a = cn.ring(5).adjacency
    assert np.array_equal((a @ a)[0, 1:], [0, 1, 1, 0])


def test_complete_approx_values():
    v = cn.complete_approx(6, 0.9)
    coeff = 0.1 * 4 / 36
    expected = np.ones(6) + coeff * np.array([-5, 1, 1, 1, 1, 1])
    assert np.allclose(v, expected, atol=1e-14)
    assert np.allclose(cn.complete_approx(6, 1.0), np.ones(6), atol=1e-15)
    with pytest.raises(ValidationError):
        cn.complete_approx(2, 0.9)


def test_complete_approx_accuracy():
    errs = {}
    for rho in (0.9, 0.95):
        errs[rho] = sign_invariant_error(cn.complete_approx(6, rho),
                                         exact_vector(cn.complete(6), rho))
    assert errs[0.9] <= 0.01
    assert 3.0 <= errs[0.9] / errs[0.95] <= 5.0


def test_ring_corollary_exact_forms():
    delta = -0.07
    r3 = cn.ring_approx(3, 1 + delta)
    assert np.allclose(r3, np.ones(3) - (delta / 9) * np.array([-2, 1, 1]), atol=1e-12)
    r4 = cn.ring_approx(4, 1 + delta)
    assert np.allclose(r4, np.ones(4) - (delta / 2) * np.array([-1, 0, 1, 0]), atol=1e-12)


def test_ring4_ordering_example():
    v = cn.ring_approx(4, 0.9)
    assert np.allclose(v, [0.95, 1.0, 1.05, 1.0], atol=1e-12)
    assert v.argmin() == 0 and v.argmax() == 2


def test_ring_monotone_with_distance():
    for n in (6, 7):
        v = cn.ring_approx(n, 0.9)
        assert v.argmin() == 0
        dist = np.minimum(np.arange(n), n - np.arange(n))
        order = np.argsort(dist, kind="stable")
        assert np.all(np.diff(v[order]) >= -1e-12)


def test_regular_equals_specializations():
    for n in range(3, 13):
        rho = 0.9
        assert np.max(np.abs(cn.regular_approx(cn.complete(n), rho)
                             - cn.complete_approx(n, rho))) <= 1e-10
        assert np.max(np.abs(cn.regular_approx(cn.ring(n), rho)
                             - cn.ring_approx(n, rho))) <= 1e-10


def test_regular_rejects_irregular():
    with pytest.raises(ValidationError):
        cn.regular_approx(cn.star(5), 0.9)


def test_lambda_approx_regular():
    g = cn.complete(6)
    rho = 0.95
    lam = cn.centrality.regular_lambda_approx(g, rho)
    exact = cn.dominant_eigenpair(perturbed_node1(g, rho)).value
    assert lam == pytest.approx(5 * (1 - (2 / 6) * 0.05), abs=1e-12)
    assert abs(lam - exact) <= 5 * 0.05**2


def test_pinv_moore_penrose_identities():
    for g in (cn.ring(6), cn.complete(7), cn.circulant_regular(8, [1, 2])):
        d = g.degree()[0]
        m = (g.adjacency - d * np.eye(g.n)) @ (g.adjacency - d * np.eye(g.n))
        mp = pinv_psd(m)
        assert np.max(np.abs(m @ mp @ m - m)) <= 1e-10
        assert np.max(np.abs(mp @ m @ mp - mp)) <= 1e-10
        assert np.max(np.abs((m @ mp).T - m @ mp)) <= 1e-10
        assert np.max(np.abs((mp @ m).T - mp @ m)) <= 1e-10


# ---------------------------------------------------------------------------
# star theorem

def test_star_exact_small():
    lam, v = cn.star_exact(3, [0.8, 0.6])
    assert lam == pytest.approx(1.0, abs=1e-14)
    expected = np.array([1.0, 0.8, 0.6])
    assert np.allclose(v, expected / np.linalg.norm(expected), atol=1e-14)


def test_star_exact_homogeneous_limit():
    n = 7
    lam, v = cn.star_exact(n, np.ones(n - 1))
    assert lam == pytest.approx(np.sqrt(n - 1), abs=1e-12)
    expected = np.concatenate(([np.sqrt(n - 1)], np.ones(n - 1)))
    assert np.allclose(v, expected / np.linalg.norm(expected), atol=1e-12)


def test_star_zero_alignment_rejected():
    with pytest.raises(ValidationError):
        cn.star_exact(4, [0.5, 0.0, 0.3])


def test_star_hub_dominates_randomized(rng):
    for _ in range(100):
        n = int(rng.integers(3, 11))
        rho = rng.uniform(0.05, 1.0, n - 1)
        lam, v = cn.star_exact(n, rho)
        assert v.argmax() == 0
        # cross-check against the exact eigendecomposition of the weighted star
        g = cn.star(n, hub_weights=rho)
        ep = cn.dominant_eigenpair(g)
        assert abs(ep.value - lam) <= 1e-10 * max(1.0, lam)
        assert sign_invariant_error(v, ep.vector) <= 1e-8


# ---------------------------------------------------------------------------
# influence report

def test_report_homogeneous_is_baseline():
    g = cn.ring(6)
    c = cn.ConstraintSet.homogeneous(6, [1, 1, 1])
    report = cn.influence_report(g, c)
    assert report.delta == pytest.approx(0.0, abs=1e-12)
    base = cn.dominant_eigenpair(g)
    assert np.allclose(report.exact.vector, base.vector, atol=1e-10)
    assert report.error is not None and report.error <= 1e-8


def test_report_regular_heterogeneous_not_uniform(rng):
    g = cn.circulant_regular(8, [1, 2])
    vecs = [[1.0, 0.5, 0.2]] + [[1.0, 1.0, 1.0]] * 7
    c = cn.ConstraintSet.from_vectors(vecs)
    report = cn.influence_report(g, c)
    assert np.var(report.exact.vector) > 1e-6
    assert report.approx_kind == "regular_first_order"
    assert report.error <= 0.05


def test_report_star_uses_exact_form():
    g = cn.star(5)
    vecs = [[1.0, 0.0], [1.0, 0.2], [1.0, 0.5], [1.0, 1.0], [2.0, 0.0]]
    c = cn.ConstraintSet.from_vectors(vecs)
    report = cn.influence_report(g, c)
    assert report.approx_kind == "star_exact"
    assert report.error <= 1e-10
    assert report.ranking[0] == 1


def test_report_disconnected_lists_components():
    g = cn.star(4)
    vecs = [[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]  # leaf 4 orthogonal
    c = cn.ConstraintSet.from_vectors(vecs)
    report = cn.influence_report(g, c)
    assert report.exact is None
    assert [1, 2, 3] in report.components
    assert [4] in report.components


def test_report_outputs(tmp_path):
    g = cn.complete(6)
    vecs = [[1.0, 0.5, 0.2]] + [[1.0, 1.0, 1.0]] * 5
    c = cn.ConstraintSet.from_vectors(vecs)
    report = cn.influence_report(g, c)
    report.to_csv(tmp_path / "c.csv", header_comments=["h"])
    doc = report.to_json(tmp_path / "c.json")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[1] == "node,exact,approx,abs_diff"
    assert len(lines) == 2 + 6
    assert doc["lambda_exact"] == pytest.approx(report.exact.value)
    assert sorted(doc["ranking"]) == [1, 2, 3, 4, 5, 6]
