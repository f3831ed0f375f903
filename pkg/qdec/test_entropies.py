import numpy as np
import pytest

from qdec.entropies import (aep_bound, aep_threshold, alicki_fannes_bound, bloch_oracle, conditional_entropy, entropy,
                            eta_from_state, fannes_bound, h_2, h_max, h_min, mutual_information, smooth,
                            von_neumann)
from qdec.randomness import SeededSampler, random_density
from qdec.tensor_core import (DensityOperator, LabeledSpace, basis_state, fidelity_distance, maximally_entangled,
                              maximally_mixed, purify, tensor)

SDP_TOL = 1e-6


@pytest.fixture
def bell():
    return maximally_entangled("A", "B", 2)


@pytest.fixture
def product():
    return tensor(maximally_mixed(LabeledSpace.of(A=2)), random_density(LabeledSpace.of(B=2), sampler=3))


def test_von_neumann_quantities_of_a_bell_pair(bell):
    assert entropy(bell, "A") == pytest.approx(1.0)
    assert entropy(bell) == pytest.approx(0.0, abs=1e-10)
    assert conditional_entropy(bell, "A", "B") == pytest.approx(-1.0)
    assert mutual_information(bell, "A", "B") == pytest.approx(2.0)
    assert von_neumann(bell, "Ic", "A", "B").value == pytest.approx(1.0)


def test_von_neumann_rejects_unknown_kinds(bell):
    with pytest.raises(ValueError):
        von_neumann(bell, "S", "A")


def test_one_shot_entropies_of_a_bell_pair(bell):
    assert h_min(bell, "B").value == pytest.approx(-1.0, abs=SDP_TOL)
    assert h_2(bell, "B").value == pytest.approx(-1.0, abs=1e-8)
    assert h_max(bell, "B").value == pytest.approx(-1.0, abs=SDP_TOL)


def test_product_with_maximally_mixed_gives_log_dimension(product):
    assert h_min(product, "B", "A").value == pytest.approx(1.0, abs=SDP_TOL)
    assert h_2(product, "B", "A").value == pytest.approx(1.0, abs=1e-6)
    assert h_max(product, "B", "A").value == pytest.approx(1.0, abs=SDP_TOL)


@pytest.mark.parametrize("d", [2, 4])
def test_unconditional_closed_forms(d):
    pi = maximally_mixed(LabeledSpace.of(A=d))
    for report in (h_min(pi), h_2(pi), h_max(pi)):
        assert report.method == "closed-form"
        assert report.value == pytest.approx(np.log2(d))


def test_h_min_of_a_pure_product_is_zero():
    psi = basis_state(LabeledSpace.of(A=2, B=2))
    assert h_min(psi, "B").value == pytest.approx(0.0, abs=SDP_TOL)


@pytest.mark.parametrize("seed", range(5))
def test_entropy_ordering_on_random_states(seed):
    rho = random_density(LabeledSpace.of(A=2, B=2), sampler=SeededSampler(seed))
    lo, mid, hi = h_min(rho, "B").value, conditional_entropy(rho, "A", "B"), h_max(rho, "B").value
    assert lo <= h_2(rho, "B").value + 1e-6
    assert lo <= mid + 1e-6
    assert mid <= hi + 1e-6


@pytest.mark.parametrize("seed", [0, 1])
def test_optimizers_agree_with_the_bloch_grid(seed):
    rho = random_density(LabeledSpace.of(A=2, B=2), sampler=SeededSampler(100 + seed))
    assert h_min(rho, "B").value == pytest.approx(bloch_oracle("min", rho, "B").value, abs=1e-3)
    assert h_2(rho, "B").value == pytest.approx(bloch_oracle("2", rho, "B").value, abs=1e-3)


def test_h_max_does_not_depend_on_the_purification():
    rho = random_density(LabeledSpace.of(A=2, B=2), rank=3, sampler=SeededSampler(21))
    wide = purify(rho, "P", dim=4)
    assert h_max(wide, "B", "A").value == pytest.approx(h_max(rho, "B").value, abs=SDP_TOL)


def test_h_min_report_is_certified(product):
    report = h_min(product, "B", "A")
    assert report.method == "optimizer"
    assert report.converged
    assert report.gap is None or report.gap >= -SDP_TOL


@pytest.mark.parametrize("kind", ["min", "2", "max"])
def test_smoothing_stays_in_the_ball_and_moves_the_right_way(kind):
    rho = DensityOperator(LabeledSpace.of(A=2), np.diag([0.99, 0.01]))
    plain = smooth(kind, rho, 0.0).value
    report = smooth(kind, rho, 0.1)
    assert fidelity_distance(rho, report.member) <= 0.1 + 1e-9
    if kind == "max":
        assert report.value <= plain + 1e-9
    else:
        assert report.value >= plain - 1e-9


def test_smoothing_validation():
    rho = maximally_mixed(LabeledSpace.of(A=2))
    with pytest.raises(ValueError):
        smooth("min", rho, 1.5)
    with pytest.raises(ValueError):
        smooth("vn", rho, 0.1)
    with pytest.raises(ValueError):
        smooth("min", rho, 0.1, strategy="greedy")


def test_continuity_bounds():
    assert fannes_bound(0.0, 4) == 0.0
    with pytest.raises(ValueError):
        fannes_bound(0.5, 4)
    assert alicki_fannes_bound(1.0, 2) == pytest.approx(4.0)


def test_aep_bound():
    assert aep_threshold(0.1) == pytest.approx(1.6 * np.log2(200))
    with pytest.raises(ValueError):
        aep_bound(1.0, 2, 5, 0.1)
    value = aep_bound(1.0, 2, 10 ** 4, 0.1)
    expected = 1.0 - 4 * np.log2(2 * np.sqrt(2) + 1) * np.sqrt(np.log2(200) / 10 ** 4)
    assert value == pytest.approx(expected)


def test_eta_from_state_is_below_the_dimension_default(product):
    assert eta_from_state(product, "B", "A") <= 2 * np.sqrt(2) + 1 + 1e-6


@pytest.mark.parametrize("kind", ["min", "2", "max"])
def test_unsmoothed_entropy_of_a_pure_state_keeps_the_state_itself(bell, kind):
    report = smooth(kind, bell, 0.0, given="B", of="A")
    assert report.strategy == "none"
    assert report.value == pytest.approx(-1.0, abs=SDP_TOL)
    assert np.allclose(report.member.matrix, np.outer(bell.amplitudes, bell.amplitudes.conj()))


@pytest.mark.parametrize("kind", ["min", "2", "max"])
def test_unsmoothed_entropy_of_a_classically_correlated_state(kind):
    rho = DensityOperator(LabeledSpace.of(A=2, B=2), np.diag([0.5, 0.0, 0.0, 0.5]))
    report = smooth(kind, rho, 0.0, given="B", of="A")
    assert report.strategy == "none"
    assert report.value == pytest.approx(0.0, abs=1e-5)
