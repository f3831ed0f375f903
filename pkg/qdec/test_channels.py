import numpy as np
import pytest

from qdec.channels import (Channel, apply, block_measurement, channel_power, choi_state, classical_broadcast,
                           complementary, defect_channel, depolarizing, dephasing, diamond_lower_bound, erasure,
                           bit_flip, from_matrices, identity_channel, load_channel, pauli_revealed, random_channel,
                           save_channel, splitter, stinespring, tensor_channels, trace_out, validate)
from qdec.randomness import SeededSampler, random_density, random_pure
from qdec.tensor_core import (DensityOperator, LabeledSpace, apply_op, basis_state, marginal, partial_trace,
                              tensor)


def _qubit(label, index):
    return basis_state(LabeledSpace(((label, 2),)), index).density()


@pytest.mark.parametrize("channel", [identity_channel(3), depolarizing(0.3, 3), dephasing(0.2), bit_flip(0.4),
                                     erasure(0.25, 3), splitter(2, 3), block_measurement(4, 2),
                                     defect_channel(0.1), pauli_revealed()])
def test_factories_are_trace_preserving(channel):
    diagnostics = validate(channel)
    assert diagnostics["tp_error"] <= 1e-9
    assert diagnostics["kraus_count"] == channel.env_dim


def test_validate_rejects_lossy_maps():
    space = LabeledSpace.of(A=2)
    with pytest.raises(ValueError):
        validate(from_matrices(space, space, [0.5 * np.eye(2)]))


def test_kraus_shape_mismatch_raises():
    with pytest.raises(ValueError):
        Channel(LabeledSpace.of(A=2), LabeledSpace.of(C=2), (np.eye(3),))


def test_complete_depolarization():
    out = apply(depolarizing(1.0, 2), _qubit("A", 0))
    assert out.labels == ("C",)
    assert np.allclose(out.matrix, np.eye(2) / 2)


def test_vanishing_kraus_operators_keep_the_environment_size():
    assert depolarizing(0.0, 2).env_dim == 4
    assert dephasing(0.0).env_dim == 2
    channel = depolarizing(0.0, 2)
    assert validate(channel)["tp_error"] <= 1e-9
    assert stinespring(channel).out_space.dim == 2 * 4
    rho = _qubit("A", 1)
    assert np.allclose(apply(channel, rho).matrix, rho.matrix)


def test_channel_acts_only_on_its_inputs():
    rho = tensor(_qubit("A", 0), _qubit("B", 1))
    out = apply(bit_flip(1.0), rho)
    assert out.labels == ("C", "B")
    assert np.allclose(out.matrix, tensor(_qubit("C", 1), _qubit("B", 1)).matrix)


def test_stinespring_dilates_the_channel():
    channel = random_channel(2, 3, 2, SeededSampler(4))
    v = stinespring(channel)
    assert v.is_isometry()
    rho = random_density(channel.in_space, sampler=5)
    dilated = partial_trace(apply_op(v, rho), "E")
    assert np.allclose(dilated.matrix, apply(channel, rho).matrix)


def test_complementary_outputs_share_a_spectrum_for_pure_inputs():
    channel = random_channel(3, 2, 3, SeededSampler(6))
    psi = random_pure(channel.in_space, sampler=7)
    out, env = apply(channel, psi), apply(complementary(channel), psi)
    a, b = np.sort(out.eigenvalues())[::-1], np.sort(env.eigenvalues())[::-1]
    k = min(a.size, b.size)
    assert np.allclose(a[:k], b[:k], atol=1e-10)


def test_identity_complement_is_trivial():
    comp = complementary(identity_channel(3))
    assert comp.out_space.dim == 1
    assert apply(comp, random_density(LabeledSpace.of(A=3), sampler=1)).trace == pytest.approx(1.0)


def test_choi_state_has_maximally_mixed_reference():
    omega = choi_state(erasure(0.3))
    assert omega.labels == ("C", "A'")
    assert omega.trace == pytest.approx(1.0)
    assert np.allclose(marginal(omega, "A'").matrix, np.eye(2) / 2)


def test_diamond_lower_bound():
    assert diamond_lower_bound(identity_channel(), identity_channel()) == pytest.approx(0.0, abs=1e-12)
    value = diamond_lower_bound(identity_channel(), bit_flip(1.0), sampler=SeededSampler(5))
    assert 1.9 <= value <= 2 + 1e-9


def test_trace_out_keeps_the_requested_system():
    space = LabeledSpace.of(A=2, B=3)
    rho = random_density(space, sampler=2)
    assert np.allclose(apply(trace_out(space, "A"), rho).matrix, marginal(rho, "A").matrix)


def test_defect_and_pauli_side_channels():
    stuck = apply(defect_channel(), tensor(_qubit("A'", 1), _qubit("S", 1)))
    assert np.allclose(stuck.matrix, np.diag([1, 0]))
    working = apply(defect_channel(), tensor(_qubit("A'", 1), _qubit("S", 0)))
    assert np.allclose(working.matrix, np.diag([0, 1]))
    flipped = apply(pauli_revealed(), tensor(_qubit("A'", 0), basis_state(LabeledSpace.of(S=4), 1).density()))
    assert np.allclose(flipped.matrix, np.diag([0, 1]))


def test_classical_broadcast_copies_bits():
    channel = classical_broadcast(lambda i: i % 2, lambda i: i // 2, 4, 2, 2)
    validate(channel)
    out = apply(channel, basis_state(LabeledSpace((("A'", 4),)), 2))
    assert np.allclose(out.matrix, tensor(_qubit("C1", 0), _qubit("C2", 1)).matrix)


def test_channel_powers_and_products():
    pair = channel_power(dephasing(0.1), 2)
    assert pair.in_space.labels == ("A_1", "A_2")
    assert pair.env_dim == 4
    validate(pair)
    with pytest.raises(ValueError):
        channel_power(dephasing(0.1), 4)
    product = tensor_channels(identity_channel(2), identity_channel(2, "B", "D"))
    assert product.out_space.labels == ("C", "D")


def test_channel_files_reload(tmp_path):
    channel = depolarizing(0.2, 2)
    path = tmp_path / "chan.json"
    save_channel(channel, str(path))
    loaded = load_channel(str(path))
    assert loaded.in_space == channel.in_space
    assert np.allclose(loaded.stack, channel.stack)


def test_apply_rejects_missing_systems():
    with pytest.raises(ValueError):
        apply(identity_channel(2, "Q"), DensityOperator(LabeledSpace.of(A=2), np.eye(2) / 2))
