import numpy as np
import pytest

from qdec.channels import (classical_broadcast, dephasing, depolarizing, erasure, from_matrices, identity_channel,
                           pauli_revealed, random_channel, splitter, uniform_side_info)
from qdec.coding import (BATCH, Inequality, RatePoint, RateRegion, broadcast_oneshot_code, ea_rate_point, ea_region,
                         iid_code, marton_region, oneshot_code, sideinfo_capacity, sideinfo_oneshot_code,
                         sideinfo_rate)
from qdec.randomness import SeededSampler, random_pure, weyl_operators
from qdec.tensor_core import (DensityOperator, LabeledSpace, PureState, basis_state, maximally_entangled, reorder,
                              tensor)


def _joined_input():
    halves = tensor(maximally_entangled("A1", "A'1", 2), maximally_entangled("A2", "A'2", 2))
    return PureState(LabeledSpace.of(A1=2, A2=2, **{"A'": 4}), reorder(halves, ("A1", "A2", "A'1", "A'2")).amplitudes)


def _pauli_corrected_input():
    """sigma^{A A' S} with the encoder undoing the Pauli announced by S."""
    phi = np.eye(2).reshape(-1) / np.sqrt(2)
    mat = np.zeros((16, 16), dtype=complex)
    for s, pauli in enumerate(weyl_operators(2)):
        v = np.kron(np.eye(2), pauli) @ phi
        flag = np.zeros(4)
        flag[s] = 1.0
        mat += np.kron(np.outer(v, v.conj()), np.diag(flag)) / 4
    return DensityOperator(LabeledSpace.of(A=2, **{"A'": 2}, S=4), mat)


@pytest.fixture(scope="module")
def identity_code():
    message = maximally_entangled("A", "B", 4)
    sigma = maximally_entangled("A''", "A'", 16)
    return oneshot_code(message, identity_channel(16, a="A'", c="C"), sigma, sampler=SeededSampler(7))


def test_identity_code_deltas(identity_code):
    assert identity_code.delta1 == pytest.approx(1.5, abs=1e-8)
    assert identity_code.delta2 == pytest.approx(0.375, abs=1e-8)
    assert identity_code.theorem_bound == pytest.approx(2 * np.sqrt(2 * np.sqrt(1.5) + 0.375))
    assert not identity_code.certified


def test_identity_code_is_exact(identity_code):
    assert identity_code.achieved <= 1e-6
    assert identity_code.within_bound()
    assert identity_code.budget_met
    assert identity_code.samples_drawn == BATCH
    assert identity_code.encoder.is_isometry()
    data = identity_code.to_dict()
    assert data["encoder_in"] == [["A", 4]]
    assert data["encoder_is_isometry"]


def test_code_input_validation():
    message = maximally_entangled("A", "B", 4)
    channel = identity_channel(2, a="A'", c="C")
    with pytest.raises(ValueError):
        oneshot_code(message, channel, maximally_entangled("A''", "A'", 2))
    with pytest.raises(ValueError):
        oneshot_code(message, channel, maximally_entangled("A''", "Q", 4))
    with pytest.raises(ValueError):
        oneshot_code(message, channel, maximally_entangled("A''", "A'", 2), eps=1.0)


def test_iid_code_over_two_identity_uses():
    sigma = maximally_entangled("A", "A'", 2)
    artifact = iid_code(identity_channel(2, a="A'", c="C"), sigma, n=2, q_bits=1, e_bits=0, sampler=SeededSampler(3))
    assert artifact.encoder.in_space.labels == ("M",)
    assert artifact.achieved <= 1e-6


def test_broadcast_code_over_a_splitter():
    sigma = PureState(LabeledSpace.of(**{"A1''": 2, "A2''": 2, "A'": 4}), _joined_input().amplitudes)
    artifact = broadcast_oneshot_code(maximally_entangled("A1", "R1", 2), maximally_entangled("A2", "R2", 2),
                                      splitter(2, 2), sigma, sampler=SeededSampler(5))
    assert artifact.kind == "broadcast"
    assert len(artifact.decoders) == 2
    assert artifact.delta_enc is not None
    assert artifact.achieved <= 1e-6


def test_sideinfo_code_needs_matching_side_marginal():
    phi = uniform_side_info(4)
    sigma = tensor(maximally_entangled("A''", "A'", 2), PureState(LabeledSpace.of(S=4), np.eye(4)[0]))
    with pytest.raises(ValueError):
        sideinfo_oneshot_code(maximally_entangled("A", "B", 2), pauli_revealed(), phi, sigma)


def test_rate_point_validation():
    assert RatePoint((0.5,), (0.25,)).as_dict() == {"Q": 0.5, "E": 0.25}
    assert RatePoint((0.1, 0.2)).as_dict() == {"Q1": 0.1, "E1": 0.0, "Q2": 0.2, "E2": 0.0}
    with pytest.raises(ValueError):
        RatePoint((-0.1,))
    with pytest.raises(ValueError):
        RatePoint((0.1, 0.2), (0.0,))


def test_region_membership_is_strict():
    region = RateRegion("box", ("Q", "E"), [Inequality("Q", {"Q": 1.0}, 1.0)], {})
    assert region.contains({"Q": 0.5, "E": 3.0})
    assert not region.contains({"Q": 1.0, "E": 0.0})


def test_ea_region_of_the_identity():
    region = ea_region(identity_channel(2, a="A'", c="C"), maximally_entangled("A", "A'", 2))
    assert region.quantities["H(A)"] == pytest.approx(1.0)
    assert region.quantities["I(A>C)"] == pytest.approx(1.0)
    assert region.quantities["I(A;C)"] == pytest.approx(2.0)
    assert region.contains(RatePoint((0.5,), (0.25,)))
    assert not region.contains(RatePoint((1.0,), (0.0,)))
    corners = {tuple(round(x, 9) for x in v) for v in region.vertices()}
    assert corners == {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)}


@pytest.mark.parametrize("channel, half_info", [(dephasing(0.5, a="A'", c="C"), 0.5),
                                                (erasure(0.5, a="A'", c="C"), 0.5)])
def test_ea_regions_of_noisy_qubit_channels(channel, half_info):
    region = ea_region(channel, maximally_entangled("A", "A'", 2))
    assert region.quantities["I(A;C)"] / 2 == pytest.approx(half_info)


def test_ea_region_needs_a_pure_input():
    with pytest.raises(ValueError):
        ea_region(identity_channel(2, a="A'", c="C"), maximally_entangled("A", "A'", 2).density())


def test_ea_search_finds_the_dephasing_optimum():
    region = ea_rate_point(dephasing(0.5, a="A'", c="C"), optimize=True, restarts=4, sampler=SeededSampler(2))
    assert region.label == "lower bound"
    assert region.quantities["I(A;C)"] / 2 == pytest.approx(0.5, abs=1e-3)


def test_sideinfo_rate_with_the_pauli_corrected_input():
    region = sideinfo_rate(pauli_revealed(), uniform_side_info(4), _pauli_corrected_input())
    assert region.quantities["I(A;C)"] == pytest.approx(2.0)
    assert region.quantities["I(A;S)"] == pytest.approx(0.0, abs=1e-10)
    assert region.contains(RatePoint((0.9,), (0.0,)))


def test_sideinfo_rate_rejects_a_mismatched_side_marginal():
    bad = tensor(maximally_entangled("A", "A'", 2).density(),
                 DensityOperator(LabeledSpace.of(S=4), np.diag([1.0, 0.0, 0.0, 0.0])))
    with pytest.raises(ValueError):
        sideinfo_rate(pauli_revealed(), uniform_side_info(4), bad)


@pytest.mark.slow
def test_sideinfo_capacity_search_reports_its_best_restart():
    estimate = sideinfo_capacity(pauli_revealed(), uniform_side_info(4), restarts=2, maxiter=40,
                                 sampler=SeededSampler(1))
    assert estimate.value == pytest.approx(max(estimate.values))
    assert estimate.value <= 1 + 1e-9
    assert estimate.region.label == "lower bound"
    assert estimate.sigma.trace == pytest.approx(1.0)


def test_marton_region_of_a_splitter():
    region = marton_region(splitter(2, 2), _joined_input())
    q = region.quantities
    assert q["I(A1;C1)"] == pytest.approx(2.0)
    assert q["I(A1;A2)"] == pytest.approx(0.0, abs=1e-10)
    assert region.contains(RatePoint((0.9, 0.9)))
    assert not region.contains(RatePoint((1.0, 0.5)))
    assert set(region.related) == {"rate_limited", "unassisted"}


@pytest.mark.parametrize("seed", range(3))
def test_marton_sum_rate_identity(seed):
    sigma = random_pure(LabeledSpace.of(A1=2, A2=2, **{"A'": 4}), SeededSampler(seed))
    q = marton_region(splitter(2, 2), sigma).quantities
    lhs = (q["H(A1A2)"] + q["I(A1>C1)"] + q["I(A2>C2)"]) / 2
    rhs = (q["I(A1;C1)"] + q["I(A2;C2)"] - q["I(A1;A2)"]) / 2
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_code_over_a_rank_deficient_dephasing_output():
    artifact = oneshot_code(maximally_entangled("A", "B", 2), dephasing(0.4, a="A'", c="C"),
                            maximally_entangled("A''", "A'", 2), sampler=SeededSampler(4), max_samples=16,
                            strict=False)
    assert np.isfinite(artifact.delta1) and np.isfinite(artifact.delta2)
    assert 0.0 <= artifact.achieved <= 2.0 + 1e-9
    assert not artifact.certified
    assert artifact.within_bound()


@pytest.mark.parametrize("seed", range(3))
def test_two_qubit_input_bounds_stay_above_two(seed):
    # pure sigma on A''A' with |A'| = 4 has H_2(A'') <= 2, so delta1 >= 3 2^{1/2 - 1}
    channel = random_channel(4, 4, 2, SeededSampler(seed), a="A'", c="C")
    artifact = oneshot_code(maximally_entangled("A", "B", 2), channel, maximally_entangled("A''", "A'", 4),
                            sampler=SeededSampler(100 + seed), max_samples=16, strict=False)
    assert artifact.delta1 == pytest.approx(3 * 2 ** -0.5, abs=1e-8)
    assert artifact.theorem_bound > 2
    assert not artifact.certified
    assert artifact.achieved <= artifact.theorem_bound


@pytest.fixture(scope="module")
def certified_instance():
    channel = random_channel(1024, 1024, 1, SeededSampler(11), a="A'", c="C")
    return channel, maximally_entangled("A''", "A'", 1024)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_certified_codes_meet_their_theorem_bound(certified_instance, seed):
    channel, sigma = certified_instance
    message = random_pure(LabeledSpace.of(A=2, R=2), SeededSampler(seed))
    artifact = oneshot_code(message, channel, sigma, sampler=SeededSampler(500 + seed), max_samples=2)
    assert artifact.delta1 <= 3 * 2 ** -4.5 + 1e-8
    assert artifact.delta2 <= 3 * 2 ** -4.5 + 1e-8
    assert artifact.certified
    assert artifact.budget_met
    assert artifact.achieved <= artifact.theorem_bound
    assert artifact.within_bound()


def _reduction_instance(seed):
    channel = depolarizing(0.1 * seed, 4, a="A'", c="C")
    psi = maximally_entangled("A", "B", 2)
    sigma = maximally_entangled("A''", "A'", 4)
    plain = oneshot_code(psi, channel, sigma, sampler=SeededSampler(seed), max_samples=16, strict=False)
    return channel, psi, sigma, plain


@pytest.mark.parametrize("seed", [0, 2])
def test_sideinfo_code_with_a_trivial_state_reduces_to_the_plain_code(seed):
    channel, psi, sigma, plain = _reduction_instance(seed)
    trivial_s = LabeledSpace.of(S=1)
    with_s = from_matrices(channel.in_space.concat(trivial_s), channel.out_space, [k.matrix for k in channel.kraus])
    side = sideinfo_oneshot_code(psi, with_s, uniform_side_info(1), tensor(sigma, basis_state(trivial_s)),
                                 sampler=SeededSampler(seed), max_samples=16, strict=False)
    assert side.delta1 == pytest.approx(plain.delta1, abs=1e-8)
    assert side.delta2 == pytest.approx(plain.delta2, abs=1e-8)
    assert side.achieved == pytest.approx(plain.achieved, abs=1e-8)


@pytest.mark.parametrize("seed", [0, 2])
def test_broadcast_code_with_an_idle_receiver_reduces_to_the_plain_code(seed):
    channel, _, sigma, plain = _reduction_instance(seed)
    split = from_matrices(channel.in_space, LabeledSpace.of(C1=4, C2=1), [k.matrix for k in channel.kraus])
    sigma_b = PureState(LabeledSpace.of(**{"A1''": 4, "A2''": 1, "A'": 4}), sigma.amplitudes)
    broadcast = broadcast_oneshot_code(maximally_entangled("A1", "B1", 2), basis_state(LabeledSpace.of(A2=1)),
                                       split, sigma_b, sampler=SeededSampler(seed), max_samples=16, strict=False)
    assert broadcast.achieved == pytest.approx(plain.achieved, abs=1e-8)


def test_pure_inputs_cannot_use_revealed_pauli_errors():
    estimate = sideinfo_capacity(pauli_revealed(), uniform_side_info(4), restarts=2, pure=True, maxiter=60,
                                 sampler=SeededSampler(8))
    assert max(estimate.values) <= 0.99
    assert estimate.pure


@pytest.mark.slow
def test_mixed_inputs_reach_the_revealed_pauli_capacity():
    estimate = sideinfo_capacity(pauli_revealed(), uniform_side_info(4), restarts=8, maxiter=500,
                                 sampler=SeededSampler(8))
    assert estimate.value >= 0.99
    assert estimate.value <= 1 + 1e-6


def test_marton_region_of_a_deterministic_classical_broadcast():
    ghz = np.zeros(8)
    ghz[[0, 7]] = 1 / np.sqrt(2)
    sigma = PureState(LabeledSpace.of(A1=2, A2=2, **{"A'": 2}), ghz)
    region = marton_region(classical_broadcast(lambda i: i, lambda i: i, 2, 2, 2), sigma)
    q = region.quantities
    assert q["I(A1;C1)"] == pytest.approx(1.0, abs=1e-9)
    assert q["I(A2;C2)"] == pytest.approx(1.0, abs=1e-9)
    assert q["I(A1;A2)"] == pytest.approx(1.0, abs=1e-9)
    bounds = {ineq.name: ineq.bound for ineq in region.inequalities}
    assert bounds["Q1+Q2"] == pytest.approx(0.5, abs=1e-9)
    assert region.contains(RatePoint((0.2, 0.2)))
    assert not region.contains(RatePoint((0.3, 0.3)))
