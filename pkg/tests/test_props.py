import math
from fractions import Fraction

import numpy as np
import pytest

from eulercs.construct import (SensingMatrix, build_binary_matrix,
                               build_extended, build_for_row_size)
from eulercs.errors import (BoundUndefined, DegenerateColumn, InvalidInput,
                            ProvenanceRequired)
from eulercs.euler import euler_square
from eulercs.props import (aspect_constant, coherence, dense_coherence,
                           max_binary_columns, rip_delta, sparsity_guarantee,
                           welch_bound)


def euler_matrix(n, k):
    return build_binary_matrix(euler_square(n, k))


def test_coherence_55x121():
    assert coherence(euler_matrix(11, 5)).coherence == 0.2


def test_coherence_230x529():
    assert coherence(euler_matrix(23, 10)).coherence == 0.1


def test_coherence_6x9():
    rep = coherence(euler_matrix(3, 2))
    assert rep.coherence == 0.5
    assert rep.max_overlap == 1
    assert rep.density == pytest.approx(1 / 3)
    assert rep.column_weight_hist == {2: 9}


def test_coherence_argmax_pair_really_attains():
    mat = euler_matrix(5, 3)
    rep = coherence(mat)
    i, j = rep.argmax_pair
    dense = mat.to_dense()
    assert abs(dense[:, i] @ dense[:, j]) == rep.max_overlap


def test_coherence_vs_brute_force():
    # independent oracle: dense normalized Gram
    for n, k in [(3, 2), (4, 3), (5, 4), (7, 3)]:
        mat = euler_matrix(n, k)
        assert coherence(mat).coherence == pytest.approx(
            dense_coherence(mat.to_dense().astype(float)))


def test_degenerate_column_detected():
    rows = np.array([[0], [0]])
    vals = np.array([[1], [0]])
    mat = SensingMatrix(m=2, M=2, alphabet="binary", k=1, rows=rows, vals=vals)
    with pytest.raises(DegenerateColumn):
        coherence(mat)


def test_welch_bound_values():
    assert welch_bound(6, 9) == pytest.approx(0.25)
    assert welch_bound(55, 121) == pytest.approx(0.1)
    for m in (3, 10, 57):
        assert welch_bound(m, m + 1) == pytest.approx(1 / m)


def test_welch_bound_undefined():
    with pytest.raises(BoundUndefined):
        welch_bound(9, 9)


def test_welch_is_a_lower_bound_on_measured_coherence():
    for n, k in [(3, 2), (11, 5), (23, 10), (8, 3)]:
        mat = euler_matrix(n, k)
        rep = coherence(mat)
        assert rep.welch <= rep.coherence


def test_max_binary_columns():
    assert max_binary_columns(6, 2, 2) == 15
    assert 9 <= 15 < 18  # n^2 <= cap < 2 n^2 for (n, k) = (3, 2)
    assert max_binary_columns(55, 5, 2) == 148
    assert max_binary_columns(4, 4, 2) == 1


def test_max_binary_columns_dominates_n_squared():
    for n, k in [(3, 2), (11, 5), (12, 2), (23, 10), (49, 6)]:
        assert max_binary_columns(n * k, k, 2) >= n * n


def test_max_binary_columns_argument_order():
    with pytest.raises(InvalidInput):
        max_binary_columns(2, 5, 1)


def test_rip_delta():
    assert rip_delta(0.2, 3) == pytest.approx(0.4)
    assert rip_delta(0.7, 1) == 0.0
    for k, kp in [(5, 3), (10, 7)]:
        assert rip_delta(1 / k, kp) == pytest.approx((kp - 1) / k)


def test_sparsity_guarantee():
    assert sparsity_guarantee(0.2) == 2   # k < 3
    assert sparsity_guarantee(0.1) == 5   # k < 5.5
    assert sparsity_guarantee(1.0) == 0   # k < 1
    assert sparsity_guarantee(Fraction(1, 5)) == 2
    assert sparsity_guarantee(0) == math.inf


def test_aspect_constant_plain():
    assert aspect_constant(euler_matrix(11, 5)) == pytest.approx(1.0)


def test_aspect_constant_extended():
    mat12, _ = build_extended(12)
    assert aspect_constant(mat12) == pytest.approx(162 / 144)
    mat60, _ = build_extended(60)
    assert aspect_constant(mat60) == pytest.approx(3924 / 3600)


def test_aspect_constant_needs_provenance():
    mat = euler_matrix(3, 2)
    mat.provenance = ""
    with pytest.raises(ProvenanceRequired):
        aspect_constant(mat)


def test_row_size_coherence_identity():
    # mu = sqrt(M)/m as an exact rational for a spread of row sizes
    for m in (6, 8, 12, 18, 20, 27, 99):
        mat = build_for_row_size(m)
        rep = coherence(mat)
        assert rep.max_overlap == 1
        root = math.isqrt(mat.M)
        assert root * root == mat.M
        assert Fraction(1, mat.k) == Fraction(root, m)


def test_report_serialization_round_trip():
    rep = coherence(euler_matrix(3, 2))
    text = rep.to_text()
    assert "coherence=0.5" in text
    record = rep.to_record()
    assert record["m"] == 6 and record["max_overlap"] == 1
