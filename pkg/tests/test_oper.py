"""Truncated representation: structure, norms, convergence, boundary contract."""

import math
import random

import numpy as np
import pytest

from pqt import words as W
from pqt.algebra import delta, unit
from pqt.errors import UniverseMismatch
from pqt.oper import (
    RepConfig,
    ShiftRepresentation,
    boundary_exactness_check,
    convergence_report,
    gamma_from_rep,
    op_norm,
)
from oracles import random_element

B = W.BCElement
T = W.t

CFG = RepConfig(dim=64, max_index=8)


@pytest.fixture(scope="module")
def rep():
    return ShiftRepresentation(CFG)


def test_config_validation():
    with pytest.raises(ValueError):
        RepConfig(dim=4)
    with pytest.raises(ValueError):
        RepConfig(dim=64, max_index=0)


def test_shift_relations(rep):
    d = rep.dim
    S, Sd = rep.forward_shift, rep.backward_shift
    pq = Sd @ S  # p then q applied right-to-left: matrix of delta_p * delta_q
    defect = pq - np.eye(d)
    # rank-one boundary defect at the top corner only
    assert np.count_nonzero(defect) == 1
    assert defect[d - 1, d - 1] == -1.0
    qp = S @ Sd
    assert np.all(qp[:, 0] == 0.0)  # annihilates e_0: the intrinsic qp != e
    assert np.array_equal(rep.word_matrix(()), np.eye(d))


def test_infiniteness_gap_survives_truncation(rep):
    d = rep.dim
    pq_defect = rep.backward_shift @ rep.forward_shift - np.eye(d)
    qp_defect = rep.forward_shift @ rep.backward_shift - np.eye(d)
    assert np.linalg.matrix_rank(pq_defect) == 1
    assert op_norm(qp_defect).value >= 1.0 - 1e-9


def test_op_norm_pinned_values(rep):
    d = rep.dim
    res = op_norm(rep.forward_shift)
    assert res.converged and abs(res.value - 1.0) < 1e-9
    assert abs(op_norm(np.eye(d)).value - 1.0) == 0.0
    assert abs(op_norm(3.0 * np.eye(d)).value - 3.0) < 1e-9
    assert op_norm(np.zeros((d, d))).value == 0.0


def test_op_norm_flags_non_convergence(rep):
    res = op_norm(rep.free_matrix(1), max_iterations=1)
    assert not res.converged and res.iterations == 1
    assert res.value > 0.0  # the estimate is still returned


def test_free_matrix_fill_is_deterministic():
    a = ShiftRepresentation(CFG)
    b = ShiftRepresentation(CFG)
    for n in (1, 3):
        assert np.array_equal(a.free_matrix(n), b.free_matrix(n))
    report_a = convergence_report(5, CFG)
    report_b = convergence_report(5, CFG)
    assert report_a.to_dict() == report_b.to_dict()


def test_free_matrix_star_is_adjoint(rep):
    assert np.array_equal(rep.free_matrix(2, True), rep.free_matrix(2).conj().T)
    with pytest.raises(ValueError):
        rep.free_matrix(CFG.max_index + 1)


def test_gamma_consistency(rep):
    for n in (1, 2, 5):
        g = gamma_from_rep(n, rep)
        norm = op_norm(rep.free_matrix(n)).value
        assert abs(n * g.value * norm - 1.0) < 1e-9


def test_convergence_rows():
    report = convergence_report(8, CFG)
    assert report.dim == CFG.dim
    values = [row.norm_diff for row in report.rows]
    for row in report.rows:
        assert abs(row.n * row.norm_diff - 1.0) < 1e-6
        assert row.converged
    assert all(values[i] > values[i + 1] - 1e-9 for i in range(len(values) - 1))
    payload = report.to_dict()
    assert set(payload["rows"][0]) == {"n", "gamma", "norm_an_minus_p", "iters"}


def test_boundary_exactness(rep):
    report = boundary_exactness_check(4, CFG)
    assert report.passed
    assert report.words_checked == 15
    # pinned interior actions
    d = rep.dim
    S, Sd = rep.forward_shift, rep.backward_shift
    e = np.eye(d)
    assert np.array_equal((Sd @ S)[:, 5], e[:, 5])  # p q acts as identity at e_5
    assert np.array_equal((S @ Sd)[:, 3], e[:, 3])  # q p acts as identity off e_0
    p3 = np.linalg.matrix_power(Sd, 3)
    assert np.array_equal(p3[:, 5], e[:, 2])
    with pytest.raises(ValueError):
        boundary_exactness_check(40, CFG)


def test_adjoint_consistency_on_random_elements(rep):
    rng = random.Random(401)
    for _ in range(100):
        x = random_element(rng, W.BCS, max_len=3, max_index=3, max_exp=2)
        lhs = rep.matrix(x.star())
        rhs = rep.matrix(x).conj().T
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_multiplicativity_without_seam_cancellation(rep):
    # no p...q contact at the seam: matrix products agree to rounding
    rng = random.Random(402)
    checked = 0
    while checked < 60:
        u = tuple(T(rng.randint(1, 3), rng.random() < 0.5) for _ in range(rng.randint(0, 2)))
        v = tuple(T(rng.randint(1, 3), rng.random() < 0.5) for _ in range(rng.randint(0, 2)))
        if rng.random() < 0.5:
            u = u + (B(rng.randint(0, 2), 0),) if rng.random() < 0.5 else u
            v = (B(rng.randint(0, 2), 0),) + v if rng.random() < 0.5 else v
        u, v = W.normalize_items(u), W.normalize_items(v)
        lhs = rep.word_matrix(W.pw_mul(u, v))
        rhs = rep.word_matrix(u) @ rep.word_matrix(v)
        assert np.max(np.abs(lhs - rhs)) < 1e-12
        checked += 1


def test_multiplicativity_for_interior_bicyclic_words(rep):
    # cancelling seams are still exact on basis vectors that never reach the edge
    d = rep.dim
    for (a, b), (c, dd) in [((0, 1), (1, 0)), ((1, 2), (2, 1)), ((0, 3), (3, 2))]:
        u, v = (B(a, b),), (B(c, dd),)
        lhs = rep.word_matrix(W.pw_mul(u, v))
        rhs = rep.word_matrix(u) @ rep.word_matrix(v)
        for i in range(8, d - 8):
            assert np.array_equal(lhs[:, i], rhs[:, i])


def test_seam_cancellation_defect_is_top_corner_mass(rep):
    # u = p, v = q t1: the merged word is t1, but the truncated product
    # differs by the t1 mass at the top basis vector, about 1/sqrt(d)
    d = rep.dim
    u, v = (W.P,), (W.Q, T(1))
    merged = rep.word_matrix(W.pw_mul(u, v))
    product = rep.word_matrix(u) @ rep.word_matrix(v)
    gap = np.abs(merged - product)
    assert gap.max() > 1e-6  # genuinely not exact
    assert gap.max() <= 2.0 / math.sqrt(d)  # but only truncation-sized


def test_element_matrix_application(rep):
    el = delta(W.BCS, (W.P,)) + delta(W.BCS, (T(1),)).scale(2)
    mat = rep.matrix(el)
    assert np.array_equal(mat, rep.backward_shift + 2.0 * rep.free_matrix(1))
    assert np.array_equal(rep.matrix(unit(W.BCS)), np.eye(rep.dim))
    with pytest.raises(UniverseMismatch):
        rep.matrix(unit(W.F2))
