import logging

import numpy as np
import pytest

from qdec.locking import (accessible_info_bound, build_scheme, criterion, from_states, key_requirement, key_scan,
                          leakage, measurement_information, mub_scheme, qkd_iacc_bound, quasi_bound, quasi_check,
                          quasi_range)
from qdec.randomness import SeededSampler


def test_schemes_are_perfectly_distinguishable_with_the_key():
    scheme = build_scheme(8, 4, 2, SeededSampler(3))
    assert scheme.pairwise_min_distance() == pytest.approx(2.0)
    assert scheme.key_guess_probability() == pytest.approx(1.0)
    assert scheme.omega().trace == pytest.approx(1.0)
    assert scheme.to_dict() == {"messages": 8, "dim_c": 4, "dim_k": 2, "pairwise_min_distance": pytest.approx(2.0)}


def test_scheme_validation():
    with pytest.raises(ValueError):
        build_scheme(9, 4, 2)
    with pytest.raises(ValueError):
        build_scheme(2, 0, 2)
    with pytest.raises(ValueError):
        from_states([np.array([1.0, 0.0]), np.array([1.0, 1.0]) / np.sqrt(2)], 2, 1)


def test_trivial_cyphertext_leaks_nothing():
    scheme = build_scheme(4, 1, 4, SeededSampler(1))
    value, basis = leakage(scheme, restarts=2, iterations=10, sampler=SeededSampler(2))
    assert value == pytest.approx(0.0, abs=1e-12)
    assert measurement_information(scheme, basis) == pytest.approx(0.0, abs=1e-12)


def test_keyless_scheme_is_read_out_by_its_own_basis():
    scheme = build_scheme(4, 4, 1, SeededSampler(5))
    assert criterion(scheme, scheme.unitary) == pytest.approx(1.5)
    assert measurement_information(scheme, scheme.unitary) == pytest.approx(2.0)
    value, _ = leakage(scheme, restarts=4, iterations=200, sampler=SeededSampler(6))
    assert value <= 1.5 + 1e-9


def test_leakage_search_is_reproducible():
    scheme = build_scheme(8, 4, 2, SeededSampler(9))
    first, _ = leakage(scheme, restarts=3, iterations=50, sampler=SeededSampler(4))
    second, _ = leakage(scheme, restarts=3, iterations=50, sampler=SeededSampler(4))
    assert first == second


def test_criterion_needs_a_unitary_basis():
    scheme = build_scheme(4, 2, 2, SeededSampler(1))
    with pytest.raises(ValueError):
        criterion(scheme, np.ones((2, 2)))


def test_mub_baseline_in_the_computational_basis():
    scheme = mub_scheme(1)
    assert scheme.dim_c == 2 and scheme.dim_k == 2
    assert criterion(scheme, np.eye(2)) == pytest.approx(0.5)


def test_accessible_information_bound():
    assert accessible_info_bound(0.0, 16) == pytest.approx(0.0)
    assert accessible_info_bound(1.5, 16) == pytest.approx(4.0)
    assert accessible_info_bound(0.9, 2) <= 1.0
    with pytest.raises(ValueError):
        accessible_info_bound(-0.1, 16)


def test_qkd_bound():
    assert qkd_iacc_bound(0.0, 10) == pytest.approx(0.0)
    assert qkd_iacc_bound(0.1, 10) > 2.0
    with pytest.raises(ValueError):
        qkd_iacc_bound(0.6, 10)


def test_key_requirement(caplog):
    expected = 32 / 0.01 * np.sqrt((2 + 128 - np.log2(0.01)) * np.log(100))
    assert key_requirement(2.0 ** 64, 0.01) == pytest.approx(expected)
    with caplog.at_level(logging.WARNING, logger="qdec.locking"):
        key_requirement(2.0 ** 64, 0.5)
    assert "exceeds e^-2" in caplog.text
    with pytest.raises(ValueError):
        key_requirement(16, 0.0)


def test_quasi_measurements():
    assert quasi_check(np.eye(4), 4, 1.0)
    assert not quasi_check(np.array([[1.0, 0.0], [1.0, 0.0]]), 2, 1.0)
    with pytest.raises(ValueError):
        quasi_check(np.array([[2.0, 0.0], [0.0, 1.0]]), 2, 1.0)
    mean, tail = quasi_bound(4.0, 1)
    assert mean == pytest.approx(2.0) and tail == 1.0
    _, tail = quasi_bound(1.0, 4, n_messages=64, r=0.5)
    assert tail == pytest.approx(2 * np.exp(-64 ** 2 * 0.25 / 16))


def test_quasi_range_is_empty_for_small_message_sets():
    low, high = quasi_range(16, 4, 0.1)
    assert low > high
    low, high = quasi_range(2.0 ** 64, 2 ** 10, 0.01)
    assert low < high


def test_key_scan_matches_schemes_across_key_sizes():
    frame = key_scan(4, 4, dims_k=(1, 2), schemes=2, restarts=2, iterations=20, sampler=SeededSampler(3))
    assert list(frame.columns) == ["dim_k", "scheme", "leakage", "information", "iacc_bound"]
    assert len(frame) == 4
    assert (frame["leakage"] <= 2.0).all()
    with pytest.raises(ValueError):
        key_scan(4, 4, dims_k=(3,), schemes=1)
