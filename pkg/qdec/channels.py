import json
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Sequence, Tuple, Union

import numpy as np

from .randomness import SeededSampler, haar_matrix, weyl_operators
from .tensor_core import (DensityOperator, LabeledSpace, LinearOp, PureState, State, _reorder_matrix,
                          as_density, as_labels, decode_matrix, encode_matrix)

logger = logging.getLogger(__name__)

TP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Channel:
    """
    Completely positive map in Kraus form, N(X) = sum_i N_i X N_i^dagger.

    Construction only checks shapes; `validate` checks trace preservation,
    which stinespring and complementary require.
    """
    in_space: LabeledSpace
    out_space: LabeledSpace
    kraus: Tuple[LinearOp, ...]

    def __post_init__(self):
        ops = []
        for k in self.kraus:
            if not isinstance(k, LinearOp):
                k = LinearOp(self.in_space, self.out_space, k)
            if k.in_space.systems != self.in_space.systems or k.out_space.systems != self.out_space.systems:
                raise ValueError("Every Kraus operator must map the channel's input space to its output space.")
            ops.append(k)
        if not ops:
            raise ValueError("A channel needs at least one Kraus operator.")
        object.__setattr__(self, "kraus", tuple(ops))

    @property
    def stack(self) -> np.ndarray:
        return np.array([k.matrix for k in self.kraus])

    @property
    def env_dim(self) -> int:
        return len(self.kraus)

    def tp_error(self) -> float:
        s = self.stack
        return float(np.linalg.norm(np.einsum("kai,kaj->ij", s.conj(), s) - np.eye(self.in_space.dim), ord=2))


def from_matrices(in_space: LabeledSpace, out_space: LabeledSpace, matrices: Sequence[np.ndarray]) -> Channel:
    """Build a channel from its Kraus matrices; vanishing ones are kept, so |E| is the count given."""
    kept = [np.asarray(m, dtype=complex) for m in matrices]
    if not kept:
        kept = [np.zeros((out_space.dim, in_space.dim), dtype=complex)]
    return Channel(in_space, out_space, tuple(LinearOp(in_space, out_space, m) for m in kept))


def validate(channel: Channel) -> Dict[str, float]:
    """
    Check trace preservation and Choi hermiticity.

    Returns:
    --------
    dict
        Diagnostics: tp_error, choi_hermiticity_error, kraus_count.
    """
    tp = channel.tp_error()
    choi = choi_matrix(channel)
    herm = float(np.abs(choi - choi.conj().T).max())
    diagnostics = {"tp_error": tp, "choi_hermiticity_error": herm, "kraus_count": channel.env_dim}
    if tp > TP_TOL:
        raise ValueError(f"Channel is not trace preserving (deviation {tp:.3e}).")
    if herm > TP_TOL:
        raise ValueError("Choi matrix of the channel is not Hermitian.")
    return diagnostics


def stinespring(channel: Channel, env: str = "E") -> LinearOp:
    """
    Stinespring isometry U = sum_i N_i x |i>^E, mapping the input to output x E.
    The environment dimension equals the Kraus count.
    """
    validate(channel)
    if env in channel.out_space:
        raise ValueError(f"Environment label {env!r} clashes with the channel output.")
    s = channel.stack
    k, d_out, d_in = s.shape
    mat = s.transpose(1, 0, 2).reshape(d_out * k, d_in)
    out = channel.out_space.concat(LabeledSpace(((env, k),)))
    return LinearOp(channel.in_space, out, mat, partial_isometry=True)


def complementary(channel: Channel, env: str = "E") -> Channel:
    """Complementary channel N^c(X) = tr_out[U X U^dagger] with Kraus operators <c|U."""
    validate(channel)
    s = channel.stack
    env_space = LabeledSpace(((env, s.shape[0]),))
    return from_matrices(channel.in_space, env_space, [s[:, c, :] for c in range(s.shape[1])])


def apply_matrix(channel: Channel, mat: np.ndarray, space: LabeledSpace) -> Tuple[np.ndarray, LabeledSpace]:
    """Raw action on a matrix over `space`; output systems come first."""
    in_labels = channel.in_space.labels
    missing = [label for label in in_labels if label not in space]
    if missing:
        raise ValueError(f"Channel acts on {missing}, which the state does not carry.")
    if space.sub(in_labels).dims != channel.in_space.dims:
        raise ValueError("State and channel disagree on input dimensions.")
    rest = space.without(in_labels)
    out_space = channel.out_space.concat(rest)
    d_in, d_rest, d_out = channel.in_space.dim, rest.dim, channel.out_space.dim
    rho = _reorder_matrix(mat, space, list(in_labels) + list(rest.labels)).reshape(d_in, d_rest, d_in, d_rest)
    s = channel.stack
    out = np.einsum("kai,ibjc,kdj->abdc", s, rho, s.conj(), optimize=True)
    return out.reshape(d_out * d_rest, d_out * d_rest), out_space


def apply(channel: Channel, x: State) -> DensityOperator:
    """
    Apply the channel to the matching systems of x, identity elsewhere.

    Parameters:
    -----------
    channel : Channel
    x : DensityOperator or PureState

    Returns:
    --------
    DensityOperator
        Output systems first, then the untouched systems.
    """
    rho = as_density(x)
    mat, space = apply_matrix(channel, rho.matrix, rho.space)
    return DensityOperator(space, mat, normalized=False)


def adjoint_matrix(channel: Channel, mat: np.ndarray, space: LabeledSpace) -> Tuple[np.ndarray, LabeledSpace]:
    """Heisenberg-picture action sum_i N_i^dagger X N_i on the output systems."""
    dual = Channel(channel.out_space, channel.in_space,
                   tuple(LinearOp(channel.out_space, channel.in_space, k.matrix.conj().T) for k in channel.kraus))
    return apply_matrix(dual, mat, space)


def choi_matrix(channel: Channel) -> np.ndarray:
    return apply_matrix(channel, *_phi_in(channel))[0]


def _choi_input_space(channel: Channel) -> LabeledSpace:
    return channel.in_space.concat(LabeledSpace((("~ref", channel.in_space.dim),)))


def choi_state(channel: Channel, reference: str = None) -> DensityOperator:
    """
    omega^{E A'} = (T x I)(Phi^{A A'}), output systems first, then the reference.

    The reference is a single system of dimension |in| labelled `reference`
    (default: the input label primed).
    """
    reference = reference or "".join(channel.in_space.labels) + "'"
    mat, space = apply_matrix(channel, *_phi_in(channel))
    space = space.relabel({"~ref": reference})
    return DensityOperator(space, mat, normalized=False)


def _phi_in(channel: Channel) -> Tuple[np.ndarray, LabeledSpace]:
    d = channel.in_space.dim
    phi = np.eye(d).reshape(-1) / np.sqrt(d)
    return np.outer(phi, phi.conj()), _choi_input_space(channel)


def diamond_lower_bound(n1: Channel, n2: Channel, restarts: int = 8, iterations: int = 50,
                        sampler: SeededSampler = None) -> float:
    """
    Lower bound on ||n1 - n2||_diamond by alternating maximization.

    For a fixed input the Helstrom projector P on the output is optimal; for
    a fixed P the best pure input is the top eigenvector of
    (Delta^dagger x I)(2P - I). Restarts begin from random pure inputs.

    Parameters:
    -----------
    n1, n2 : Channel
        Channels with identical input and output spaces.
    restarts : int
        Number of random starting inputs.
    iterations : int
        Alternating steps per restart.

    Returns:
    --------
    float
        max over searched inputs of ||((n1 - n2) x I)(sigma)||_1
    """
    if n1.in_space.systems != n2.in_space.systems or n1.out_space.systems != n2.out_space.systems:
        raise ValueError("Channels must share input and output spaces.")
    if restarts < 1 or iterations < 1:
        raise ValueError("Restarts and iterations must be positive.")
    sampler = sampler or SeededSampler(0)
    space = _choi_input_space(n1)
    d = space.dim

    def gap(vec):
        rho = np.outer(vec, vec.conj())
        out1, out_space = apply_matrix(n1, rho, space)
        out2, _ = apply_matrix(n2, rho, space)
        return out1 - out2, out_space

    best = 0.0
    for _ in range(restarts):
        vec = sampler.ginibre(d, 1).reshape(-1)
        vec /= np.linalg.norm(vec)
        value = 0.0
        for _ in range(iterations):
            delta, out_space = gap(vec)
            vals, vecs = np.linalg.eigh(delta)
            current = float(np.abs(vals).sum())
            if current <= value + 1e-12:
                value = max(value, current)
                break
            value = current
            pos = vecs[:, vals > 0]
            witness = 2 * pos @ pos.conj().T - np.eye(delta.shape[0])
            back1, _ = adjoint_matrix(n1, witness, out_space)
            back2, _ = adjoint_matrix(n2, witness, out_space)
            vec = np.linalg.eigh(back1 - back2)[1][:, -1]
        best = max(best, value)
    logger.debug("Diamond lower bound %.10f after %d restarts", best, restarts)
    return best


# ---------------------------------------------------------------------------
# channel factories
# ---------------------------------------------------------------------------

def _single(label: str, d: int) -> LabeledSpace:
    return LabeledSpace(((label, d),))


def identity_channel(d: int = 2, a: str = "A", c: str = "C") -> Channel:
    return from_matrices(_single(a, d), _single(c, d), [np.eye(d)])


def depolarizing(p: float, d: int = 2, a: str = "A", c: str = "C") -> Channel:
    """rho -> (1-p) rho + p pi, with Weyl Kraus operators (p = 1 is complete depolarization)."""
    if not 0 <= p <= 1:
        raise ValueError("Depolarizing parameter p must be between 0 and 1.")
    weyl = weyl_operators(d)
    weights = [1 - p + p / d ** 2] + [p / d ** 2] * (d ** 2 - 1)
    return from_matrices(_single(a, d), _single(c, d), [np.sqrt(w) * u for w, u in zip(weights, weyl)])


def pauli_channel(probs: Sequence[float], a: str = "A", c: str = "C") -> Channel:
    """Qubit Pauli channel with probabilities for I, X, Z, XZ."""
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (4,) or np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
        raise ValueError("Pauli channel needs four non-negative probabilities summing to 1.")
    return from_matrices(_single(a, 2), _single(c, 2), [np.sqrt(q) * u for q, u in zip(probs, weyl_operators(2))])


def dephasing(p: float = 0.5, a: str = "A", c: str = "C") -> Channel:
    """Kraus {sqrt(1-p) I, sqrt(p) Z}."""
    if not 0 <= p <= 1:
        raise ValueError("Dephasing parameter p must be between 0 and 1.")
    return pauli_channel([1 - p, 0, p, 0], a, c)


def bit_flip(p: float = 1.0, a: str = "A", c: str = "C") -> Channel:
    """Kraus {sqrt(1-p) I, sqrt(p) X}."""
    if not 0 <= p <= 1:
        raise ValueError("Flip probability p must be between 0 and 1.")
    return pauli_channel([1 - p, p, 0, 0], a, c)


def erasure(p: float, d: int = 2, a: str = "A", c: str = "C") -> Channel:
    """Output the input with probability 1-p, otherwise the flag |d> (output dimension d+1)."""
    if not 0 <= p <= 1:
        raise ValueError("Erasure probability p must be between 0 and 1.")
    keep = np.sqrt(1 - p) * np.vstack([np.eye(d), np.zeros((1, d))])
    flags = []
    for i in range(d):
        k = np.zeros((d + 1, d))
        k[d, i] = np.sqrt(p)
        flags.append(k)
    return from_matrices(_single(a, d), _single(c, d + 1), [keep] + flags)


def trace_out(space: LabeledSpace, keep: Union[str, Sequence[str]]) -> Channel:
    """Partial-trace map on `space` keeping the systems in `keep` (same labels on output)."""
    keep = as_labels(keep)
    out = space.sub(keep)
    rest = space.without(keep)
    mats = []
    for j in range(rest.dim):
        bra = np.zeros((1, rest.dim))
        bra[0, j] = 1.0
        ordered = np.kron(np.eye(out.dim), bra)
        # columns of `ordered` follow (keep, rest); bring them to the input order
        mats.append(_reorder_columns(ordered, out.concat(rest), space.labels))
    return from_matrices(space, out, mats)


def _reorder_columns(mat: np.ndarray, space: LabeledSpace, labels: Sequence[str]) -> np.ndarray:
    rows = mat.shape[0]
    n = len(space)
    perm = [space.labels.index(label) for label in labels]
    tensor_ = mat.reshape((rows,) + space.dims).transpose([0] + [p + 1 for p in perm])
    return tensor_.reshape(rows, space.dim)


def isometry_channel(v: LinearOp, scale: float = 1.0) -> Channel:
    """X -> scale V X V^dagger (trace preserving only when V is an isometry and scale = 1)."""
    if scale < 0:
        raise ValueError("Scale must be non-negative.")
    return from_matrices(v.in_space, v.out_space, [np.sqrt(scale) * v.matrix])


def measurement_channel(ops: Sequence[np.ndarray], in_space: LabeledSpace, out: str = "E",
                        register: str = "X") -> Channel:
    """
    X -> sum_i |i><i|^register x M_i X M_i^dagger for operators M_i: in -> out.
    """
    ops = [np.asarray(m, dtype=complex) for m in ops]
    d_out = ops[0].shape[0]
    if any(m.shape != (d_out, in_space.dim) for m in ops):
        raise ValueError("Measurement operators must share one shape (|out|, |in|).")
    n = len(ops)
    out_space = LabeledSpace(((register, n), (out, d_out)))
    mats = []
    for i, m in enumerate(ops):
        flag = np.zeros((n, 1))
        flag[i, 0] = 1.0
        mats.append(np.kron(flag, m))
    return from_matrices(in_space, out_space, mats)


def block_measurement(dim_a: int, dim_e: int, a: str = "A", out: str = "E", register: str = "X") -> Channel:
    """Complete measurement onto |A|/|E| orthogonal blocks, each relabelled onto E."""
    if dim_e < 1 or dim_a % dim_e:
        raise ValueError("|A| must be divisible by |E| for a block measurement.")
    blocks = []
    for i in range(dim_a // dim_e):
        m = np.zeros((dim_e, dim_a))
        m[:, i * dim_e:(i + 1) * dim_e] = np.eye(dim_e)
        blocks.append(m)
    return measurement_channel(blocks, _single(a, dim_a), out, register)


def defect_channel(noise: float = 0.0, a: str = "A'", s: str = "S", c: str = "C") -> Channel:
    """
    Single memory cell N^{A'S->C}: S = |1> marks a defective cell that always
    outputs |0>; a working cell (S = |0>) applies a depolarizing channel with
    parameter `noise` (0 gives a perfect cell).
    """
    good = depolarizing(noise, 2).stack
    in_space = LabeledSpace(((a, 2), (s, 2)))
    mats = [np.kron(k, np.array([[1.0, 0.0]])) for k in good]
    for j in range(2):
        stuck = np.zeros((2, 2))
        stuck[0, j] = 1.0
        mats.append(np.kron(stuck, np.array([[0.0, 1.0]])))
    return from_matrices(in_space, _single(c, 2), mats)


def pauli_revealed(a: str = "A'", s: str = "S", c: str = "C") -> Channel:
    """Qubit channel whose state S (dimension 4) selects which Pauli acts."""
    in_space = LabeledSpace(((a, 2), (s, 4)))
    mats = []
    for idx, pauli in enumerate(weyl_operators(2)):
        bra = np.zeros((1, 4))
        bra[0, idx] = 1.0
        mats.append(np.kron(pauli, bra))
    return from_matrices(in_space, _single(c, 2), mats)


def uniform_side_info(d: int, s: str = "S", s_ref: str = "S'") -> PureState:
    """Classical uniform channel state: sum_s |s>^S |s>^{S'} / sqrt(d)."""
    return PureState(LabeledSpace(((s, d), (s_ref, d))), np.eye(d).reshape(-1) / np.sqrt(d))


def classical_side_info(probs: Sequence[float], s: str = "S", s_ref: str = "S'") -> PureState:
    probs = np.asarray(probs, dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
        raise ValueError("Side-information probabilities must be non-negative and sum to 1.")
    d = probs.size
    return PureState(LabeledSpace(((s, d), (s_ref, d))), np.diag(np.sqrt(probs)).reshape(-1))


def splitter(d1: int = 2, d2: int = 2, a: str = "A'", c1: str = "C1", c2: str = "C2") -> Channel:
    """Identity map A' -> C1 C2 with |A'| = |C1||C2|."""
    return from_matrices(_single(a, d1 * d2), LabeledSpace(((c1, d1), (c2, d2))), [np.eye(d1 * d2)])


def classical_broadcast(f1: Callable[[int], int], f2: Callable[[int], int], d_in: int, d1: int, d2: int,
                        a: str = "A'", c1: str = "C1", c2: str = "C2") -> Channel:
    """Deterministic classical broadcast |i> -> |f1(i)>|f2(i)>, the environment keeping i."""
    mats = []
    for i in range(d_in):
        k = np.zeros((d1 * d2, d_in))
        k[f1(i) * d2 + f2(i), i] = 1.0
        mats.append(k)
    return from_matrices(_single(a, d_in), LabeledSpace(((c1, d1), (c2, d2))), mats)


def random_channel(d_in: int, d_out: int, n_kraus: int, sampler: SeededSampler,
                   a: str = "A", c: str = "C") -> Channel:
    """Channel from a Haar-random isometry into out x env."""
    if d_out * n_kraus < d_in:
        raise ValueError("Output times Kraus count must be at least the input dimension.")
    u = haar_matrix(d_out * n_kraus, sampler)[:, :d_in]
    iso = u.reshape(d_out, n_kraus, d_in)
    return from_matrices(_single(a, d_in), _single(c, d_out), [iso[:, k, :] for k in range(n_kraus)])


def relabel(channel: Channel, mapping: Dict[str, str]) -> Channel:
    in_space, out_space = channel.in_space.relabel(mapping), channel.out_space.relabel(mapping)
    return from_matrices(in_space, out_space, [k.matrix for k in channel.kraus])


def tensor_channels(n1: Channel, n2: Channel) -> Channel:
    """Product channel n1 x n2 on disjoint systems."""
    in_space, out_space = n1.in_space.concat(n2.in_space), n1.out_space.concat(n2.out_space)
    return from_matrices(in_space, out_space, [np.kron(k1.matrix, k2.matrix) for k1 in n1.kraus for k2 in n2.kraus])


def channel_power(channel: Channel, n: int) -> Channel:
    """n copies with labels suffixed _1 .. _n (n <= 3)."""
    if not 1 <= n <= 3:
        raise ValueError("Channel powers are limited to 1 <= n <= 3 copies.")
    labels = set(channel.in_space.labels) | set(channel.out_space.labels)
    copies = [relabel(channel, {label: f"{label}_{i + 1}" for label in labels}) for i in range(n)]
    result = copies[0]
    for extra in copies[1:]:
        result = tensor_channels(result, extra)
    return result


# ---------------------------------------------------------------------------
# CHAN-JSON
# ---------------------------------------------------------------------------

def channel_to_dict(channel: Channel) -> dict:
    return {"in": [list(s) for s in channel.in_space.systems],
            "out": [list(s) for s in channel.out_space.systems],
            "kraus": [encode_matrix(k.matrix) for k in channel.kraus]}


def channel_from_dict(data: dict) -> Channel:
    try:
        in_space = LabeledSpace(tuple((label, dim) for label, dim in data["in"]))
        out_space = LabeledSpace(tuple((label, dim) for label, dim in data["out"]))
        mats = [decode_matrix(m) for m in data["kraus"]]
    except (KeyError, TypeError) as e:
        raise ValueError(f"Malformed CHAN-JSON document: {e}") from e
    return Channel(in_space, out_space, tuple(LinearOp(in_space, out_space, m) for m in mats))


def load_channel(path: str) -> Channel:
    with open(path) as f:
        return channel_from_dict(json.load(f))


def save_channel(channel: Channel, path: str) -> None:
    with open(path, "w") as f:
        json.dump(channel_to_dict(channel), f)


if __name__ == "__main__":
    try:
        test_cases = [
            ("identity", identity_channel()),
            ("depolarizing p=1", depolarizing(1.0)),
            ("dephasing", dephasing()),
            ("erasure p=0.5", erasure(0.5)),
        ]
        print("\nRunning test cases...")
        for name, channel in test_cases:
            diagnostics = validate(channel)
            comp = complementary(channel)
            out = apply(comp, DensityOperator(channel.in_space, np.diag([1.0, 0.0])))
            print(f"\nResults for {name}")
            print(f"Kraus count |E|: {diagnostics['kraus_count']}, TP error: {diagnostics['tp_error']:.2e}")
            print(f"Complementary output spectrum: {np.round(out.eigenvalues(), 6).tolist()}")
            print("--------------------------------")
        bound = diamond_lower_bound(identity_channel(), bit_flip(1.0), sampler=SeededSampler(5))
        print(f"Diamond lower bound, identity vs bit flip: {bound:.10f}")
    except ValueError as e:
        print(f"Error: {str(e)}")
    except Exception as e:
        print(f"An unexpected error occurred: {str(e)}")
