import json
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

# Structural invariants (hermiticity, positivity, normalization)
TOL = 1e-10
# Equalities derived through eigensolvers or products of several operators
DERIVED_TOL = 1e-8
# Eigenvalues below this count as zero when taking supports and ranks
RANK_CUTOFF = 1e-12

Labels = Union[str, Sequence[str], None]


def as_labels(labels: Labels) -> Tuple[str, ...]:
    """Normalize a label argument ('A', ['A', 'B'] or None) to a tuple."""
    if labels is None:
        return ()
    if isinstance(labels, str):
        return (labels,)
    return tuple(labels)


@dataclass(frozen=True)
class LabeledSpace:
    """
    Ordered tensor product of named finite-dimensional systems.

    The computational basis in label order is the canonical basis used by
    every operator and by op/vec duality.
    """
    systems: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        systems = tuple((str(label), int(dim)) for label, dim in self.systems)
        labels = [label for label, _ in systems]
        if len(set(labels)) != len(labels):
            raise ValueError(f"Labels must be unique, got {labels}.")
        if any(dim < 1 for _, dim in systems):
            raise ValueError("Every system dimension must be a positive integer.")
        object.__setattr__(self, "systems", systems)

    @classmethod
    def of(cls, **dims: int) -> "LabeledSpace":
        return cls(tuple(dims.items()))

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.systems)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(dim for _, dim in self.systems)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=int)) if self.systems else 1

    def __contains__(self, label: str) -> bool:
        return label in self.labels

    def __len__(self) -> int:
        return len(self.systems)

    def dim_of(self, labels: Labels) -> int:
        return self.sub(labels).dim

    def sub(self, labels: Labels) -> "LabeledSpace":
        """Subspace made of the given labels, in the given order."""
        lookup = dict(self.systems)
        wanted = as_labels(labels)
        missing = [label for label in wanted if label not in lookup]
        if missing:
            raise ValueError(f"Unknown labels {missing}; space has {list(self.labels)}.")
        return LabeledSpace(tuple((label, lookup[label]) for label in wanted))

    def without(self, labels: Labels) -> "LabeledSpace":
        dropped = set(as_labels(labels))
        missing = dropped - set(self.labels)
        if missing:
            raise ValueError(f"Unknown labels {sorted(missing)}; space has {list(self.labels)}.")
        return LabeledSpace(tuple(s for s in self.systems if s[0] not in dropped))

    def concat(self, other: "LabeledSpace") -> "LabeledSpace":
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise ValueError(f"Label collision on {sorted(clash)}.")
        return LabeledSpace(self.systems + other.systems)

    def relabel(self, mapping: Dict[str, str]) -> "LabeledSpace":
        return LabeledSpace(tuple((mapping.get(label, label), dim) for label, dim in self.systems))


@dataclass(frozen=True, eq=False)
class PureState:
    """
    Vector over a labeled space. With normalized=False the vector may have
    any norm (used for unnormalized objects such as vec(M)).
    """
    space: LabeledSpace
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        vec = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if vec.size != self.space.dim:
            raise ValueError(f"Amplitude vector has length {vec.size}, space dimension is {self.space.dim}.")
        if self.normalized and abs(np.linalg.norm(vec) - 1.0) > TOL:
            raise ValueError("Pure state must have unit 2-norm.")
        object.__setattr__(self, "amplitudes", vec)

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.space.labels

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> "DensityOperator":
        return DensityOperator(self.space, np.outer(self.amplitudes, self.amplitudes.conj()),
                               normalized=self.normalized)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """
    Positive semidefinite operator over a labeled space.

    normalized=True enforces unit trace. normalized=False admits any positive
    operator, e.g. subnormalized smoothing-ball members or outputs of maps
    that are not trace preserving.
    """
    space: LabeledSpace
    matrix: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        d = self.space.dim
        if mat.shape != (d, d):
            raise ValueError(f"Density matrix has shape {mat.shape}, expected {(d, d)}.")
        if not np.allclose(mat, mat.conj().T, atol=TOL):
            raise ValueError("Density operator must be Hermitian.")
        mat = (mat + mat.conj().T) / 2
        if np.linalg.eigvalsh(mat)[0] < -TOL:
            raise ValueError("Density operator must be positive semidefinite.")
        if self.normalized and abs(np.trace(mat).real - 1.0) > TOL:
            raise ValueError("Density operator must have unit trace.")
        object.__setattr__(self, "matrix", mat)

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.space.labels

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def eigenvalues(self) -> np.ndarray:
        return np.clip(np.linalg.eigvalsh(self.matrix), 0.0, None)


@dataclass(frozen=True, eq=False)
class LinearOp:
    """Operator M^{in->out}; partial_isometry=True is verified on construction."""
    in_space: LabeledSpace
    out_space: LabeledSpace
    matrix: np.ndarray
    partial_isometry: bool = False

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        shape = (self.out_space.dim, self.in_space.dim)
        if mat.shape != shape:
            raise ValueError(f"Operator matrix has shape {mat.shape}, expected {shape}.")
        if self.partial_isometry:
            proj = mat.conj().T @ mat
            if np.linalg.norm(proj @ proj - proj) > DERIVED_TOL:
                raise ValueError("Operator flagged as partial isometry but V^dagger V is not idempotent.")
        object.__setattr__(self, "matrix", mat)

    @property
    def dagger(self) -> "LinearOp":
        return LinearOp(self.out_space, self.in_space, self.matrix.conj().T, self.partial_isometry)

    def is_isometry(self, tol: float = DERIVED_TOL) -> bool:
        return bool(np.linalg.norm(self.matrix.conj().T @ self.matrix - np.eye(self.in_space.dim)) <= tol)

    def compose(self, first: "LinearOp") -> "LinearOp":
        """self after first; first's output labels must be self's input labels."""
        if set(first.out_space.labels) != set(self.in_space.labels):
            raise ValueError("Cannot compose operators whose spaces do not match.")
        inner = _reorder_rows(first.matrix, first.out_space, self.in_space.labels)
        return LinearOp(first.in_space, self.out_space, self.matrix @ inner)


State = Union[PureState, DensityOperator]


# ---------------------------------------------------------------------------
# raw array helpers
# ---------------------------------------------------------------------------

def _axes(space: LabeledSpace, labels: Sequence[str]) -> List[int]:
    return [space.labels.index(label) for label in labels]


def _reorder_vector(vec: np.ndarray, space: LabeledSpace, labels: Sequence[str]) -> np.ndarray:
    if tuple(labels) == space.labels or len(space) <= 1:
        return vec
    tensor_ = vec.reshape(space.dims).transpose(_axes(space, labels))
    return tensor_.reshape(-1)


def _reorder_matrix(mat: np.ndarray, space: LabeledSpace, labels: Sequence[str]) -> np.ndarray:
    if tuple(labels) == space.labels or len(space) <= 1:
        return mat
    n = len(space)
    perm = _axes(space, labels)
    tensor_ = mat.reshape(space.dims + space.dims).transpose(perm + [p + n for p in perm])
    return tensor_.reshape(space.dim, space.dim)


def _reorder_rows(mat: np.ndarray, space: LabeledSpace, labels: Sequence[str]) -> np.ndarray:
    if tuple(labels) == space.labels or len(space) <= 1:
        return mat
    cols = mat.shape[1]
    tensor_ = mat.reshape(space.dims + (cols,)).transpose(_axes(space, labels) + [len(space)])
    return tensor_.reshape(space.dim, cols)


def ptrace_matrix(mat: np.ndarray, space: LabeledSpace, keep: Sequence[str]) -> np.ndarray:
    """Partial trace on raw matrices; the result is ordered as `keep`."""
    keep = tuple(keep)
    rest = [label for label in space.labels if label not in keep]
    ordered = _reorder_matrix(mat, space, list(keep) + rest)
    dk = space.dim_of(keep)
    dr = space.dim // dk
    return np.einsum("ijkj->ik", ordered.reshape(dk, dr, dk, dr))


def ptrace_vector(vec: np.ndarray, space: LabeledSpace, keep: Sequence[str]) -> np.ndarray:
    """Reduced matrix of a (possibly unnormalized) vector, ordered as `keep`."""
    keep = tuple(keep)
    rest = [label for label in space.labels if label not in keep]
    dk = space.dim_of(keep)
    psi = _reorder_vector(vec, space, list(keep) + rest).reshape(dk, -1)
    return psi @ psi.conj().T


def psd_power(mat: np.ndarray, power: float, floor: float = RANK_CUTOFF) -> np.ndarray:
    """Matrix power of a PSD matrix; eigenvalues below `floor` are treated as zero."""
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
    scaled = np.where(vals > floor, np.clip(vals, floor, None) ** power, 0.0)
    return (vecs * scaled) @ vecs.conj().T


def trace_norm(mat: np.ndarray) -> float:
    if np.allclose(mat, mat.conj().T, atol=TOL):
        return float(np.abs(np.linalg.eigvalsh((mat + mat.conj().T) / 2)).sum())
    return float(np.linalg.svd(mat, compute_uv=False).sum())


def uhlmann_matrices(psi: np.ndarray, phi: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Optimal partial isometry between purifiers.

    psi has shape (d_shared, d_B) and phi (d_shared, d_C). Returns V of shape
    (d_C, d_B) maximizing |<phi|(I x V)|psi>| and the achieved overlap.
    """
    cross = psi.T @ phi.conj()
    left, sing, right_h = np.linalg.svd(cross, full_matrices=False)
    return right_h.conj().T @ left.conj().T, float(sing.sum())


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def basis_state(space: LabeledSpace, index: Union[int, Sequence[int]] = 0) -> PureState:
    """Computational basis vector; `index` may be a flat index or one digit per system."""
    if not isinstance(index, (int, np.integer)):
        index = int(np.ravel_multi_index(tuple(index), space.dims)) if space.systems else 0
    if not 0 <= index < space.dim:
        raise ValueError(f"Basis index {index} out of range for dimension {space.dim}.")
    vec = np.zeros(space.dim, dtype=complex)
    vec[index] = 1.0
    return PureState(space, vec)


def maximally_entangled(label_a: str, label_b: str, d: int) -> PureState:
    """|Phi>^{ab} = sum_i |ii> / sqrt(d)."""
    space = LabeledSpace(((label_a, d), (label_b, d)))
    return PureState(space, np.eye(d).reshape(-1) / np.sqrt(d))


def maximally_mixed(space: LabeledSpace) -> DensityOperator:
    return DensityOperator(space, np.eye(space.dim) / space.dim)


def as_density(x: State) -> DensityOperator:
    return x.density() if isinstance(x, PureState) else x


def identity_op(space: LabeledSpace) -> LinearOp:
    return LinearOp(space, space, np.eye(space.dim), partial_isometry=True)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def tensor(x, y):
    """
    Tensor product of two objects of the same kind with disjoint labels.

    Parameters:
    -----------
    x, y : PureState, DensityOperator or LinearOp

    Returns:
    --------
    Same kind as the inputs, labels concatenated in order.
    """
    if type(x) is not type(y):
        raise ValueError("tensor requires two objects of the same kind.")
    if isinstance(x, PureState):
        return PureState(x.space.concat(y.space), np.kron(x.amplitudes, y.amplitudes),
                         normalized=x.normalized and y.normalized)
    if isinstance(x, DensityOperator):
        return DensityOperator(x.space.concat(y.space), np.kron(x.matrix, y.matrix),
                               normalized=x.normalized and y.normalized)
    if isinstance(x, LinearOp):
        return LinearOp(x.in_space.concat(y.in_space), x.out_space.concat(y.out_space),
                        np.kron(x.matrix, y.matrix),
                        partial_isometry=x.partial_isometry and y.partial_isometry)
    raise ValueError(f"Cannot tensor objects of type {type(x).__name__}.")


def reorder(x: State, labels: Labels) -> State:
    """Permute the tensor factors of a state into the given label order."""
    labels = as_labels(labels)
    if sorted(labels) != sorted(x.labels):
        raise ValueError(f"Reorder needs a permutation of {list(x.labels)}, got {list(labels)}.")
    space = x.space.sub(labels)
    if isinstance(x, PureState):
        return PureState(space, _reorder_vector(x.amplitudes, x.space, labels), x.normalized)
    return DensityOperator(space, _reorder_matrix(x.matrix, x.space, labels), x.normalized)


def partial_trace(rho: State, drop: Labels) -> DensityOperator:
    """
    Trace out the systems in `drop`.

    Parameters:
    -----------
    rho : DensityOperator or PureState
    drop : label or labels to trace out

    Returns:
    --------
    DensityOperator
        Marginal on the remaining systems, in their original order.
    """
    drop = as_labels(drop)
    missing = [label for label in drop if label not in rho.space]
    if missing:
        raise ValueError(f"Cannot trace out unknown labels {missing}.")
    keep = [label for label in rho.labels if label not in drop]
    return marginal(rho, keep)


def marginal(rho: State, keep: Labels) -> DensityOperator:
    """Reduced state on `keep`, ordered as given."""
    keep = as_labels(keep)
    space = rho.space.sub(keep)
    if isinstance(rho, PureState):
        mat = ptrace_vector(rho.amplitudes, rho.space, keep)
    else:
        mat = ptrace_matrix(rho.matrix, rho.space, keep)
    return DensityOperator(space, mat, normalized=rho.normalized)


def apply_op(op: LinearOp, x: State) -> State:
    """
    Apply op^{in->out} to the `in` systems of x, identity elsewhere.

    The output space lists op's output systems first, then the untouched
    systems in their original order.
    """
    in_labels = op.in_space.labels
    missing = [label for label in in_labels if label not in x.space]
    if missing:
        raise ValueError(f"Operator acts on {missing}, which the state does not carry.")
    rest = x.space.without(in_labels)
    out_space = op.out_space.concat(rest)
    order = list(in_labels) + list(rest.labels)
    d_in, d_rest, d_out = op.in_space.dim, rest.dim, op.out_space.dim
    if isinstance(x, PureState):
        psi = _reorder_vector(x.amplitudes, x.space, order).reshape(d_in, d_rest)
        return PureState(out_space, (op.matrix @ psi).reshape(-1), normalized=False)
    rho = _reorder_matrix(x.matrix, x.space, order).reshape(d_in, d_rest, d_in, d_rest)
    out = np.einsum("ai,ibjc,dj->abdc", op.matrix, rho, op.matrix.conj())
    return DensityOperator(out_space, out.reshape(d_out * d_rest, d_out * d_rest), normalized=False)


def purify(rho: DensityOperator, label: str = "P", dim: Optional[int] = None) -> PureState:
    """
    Purification by eigendecomposition.

    Parameters:
    -----------
    rho : DensityOperator
        State to purify (unit trace not required).
    label : str
        Label of the purifying system.
    dim : int, optional
        Pad the purifier to this dimension; defaults to the numerical rank.

    Returns:
    --------
    PureState
        Vector over rho's systems followed by the purifier.
    """
    if label in rho.space:
        raise ValueError(f"Purifier label {label!r} already used by the state.")
    vals, vecs = np.linalg.eigh(rho.matrix)
    support = vals > RANK_CUTOFF
    vals, vecs = vals[support][::-1], vecs[:, support][:, ::-1]
    rank = max(1, int(support.sum()))
    dim = rank if dim is None else int(dim)
    if dim < rank:
        raise ValueError(f"Purifier dimension {dim} is below the rank {rank}.")
    coeffs = np.zeros((rho.space.dim, dim), dtype=complex)
    coeffs[:, :vals.size] = vecs * np.sqrt(vals)
    space = rho.space.concat(LabeledSpace(((label, dim),)))
    return PureState(space, coeffs.reshape(-1), normalized=rho.normalized)


def op_of_vec(psi: PureState, frm: Labels, to: Labels) -> LinearOp:
    """op_{frm->to}(psi) with matrix elements <b|op|a> = <a,b|psi>."""
    frm, to = as_labels(frm), as_labels(to)
    if sorted(frm + to) != sorted(psi.labels):
        raise ValueError("op_of_vec needs the two label groups to partition the state's systems.")
    in_space, out_space = psi.space.sub(frm), psi.space.sub(to)
    mat = _reorder_vector(psi.amplitudes, psi.space, frm + to).reshape(in_space.dim, out_space.dim)
    return LinearOp(in_space, out_space, mat.T)


def vec_of_op(op: LinearOp) -> PureState:
    """Inverse of op_of_vec; the vector lives on in-systems followed by out-systems."""
    space = op.in_space.concat(op.out_space)
    return PureState(space, op.matrix.T.reshape(-1), normalized=False)


def _aligned(rho: State, sigma: State) -> Tuple[np.ndarray, np.ndarray]:
    rho, sigma = as_density(rho), as_density(sigma)
    if sorted(rho.labels) != sorted(sigma.labels) or rho.space.dim != sigma.space.dim:
        raise ValueError("States must live on the same labeled space.")
    if rho.space.sub(sigma.labels).dims != sigma.space.dims:
        raise ValueError("States disagree on system dimensions.")
    return rho.matrix, _reorder_matrix(sigma.matrix, sigma.space, rho.labels)


def fidelity(rho: State, sigma: State) -> float:
    """
    F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1, plus sqrt((1-tr rho)(1-tr sigma))
    for subnormalized arguments.
    """
    a, b = _aligned(rho, sigma)
    overlap = np.linalg.svd(psd_power(a, 0.5) @ psd_power(b, 0.5), compute_uv=False).sum()
    deficit = max(0.0, 1.0 - np.trace(a).real) * max(0.0, 1.0 - np.trace(b).real)
    return float(min(1.0, overlap + np.sqrt(deficit)))


def trace_distance(rho: State, sigma: State) -> float:
    """||rho - sigma||_1, in [0, 2] for normalized states (not halved)."""
    a, b = _aligned(rho, sigma)
    return trace_norm(a - b)


def fidelity_distance(rho: State, sigma: State) -> float:
    return float(np.sqrt(max(0.0, 1.0 - fidelity(rho, sigma) ** 2)))


def helstrom(rho: State, sigma: State) -> Tuple[float, Tuple[np.ndarray, np.ndarray]]:
    """
    Optimal equal-prior discrimination of two states.

    Returns:
    --------
    tuple
        (guessing probability, (P, I - P)) with P the projector onto the
        positive eigenspace of rho - sigma.
    """
    a, b = _aligned(rho, sigma)
    vals, vecs = np.linalg.eigh(a - b)
    pos = vecs[:, vals > 0]
    proj = pos @ pos.conj().T
    p_guess = 0.5 + 0.25 * float(np.abs(vals).sum())
    return p_guess, (proj, np.eye(a.shape[0]) - proj)


def schmidt(psi: PureState, part: Labels = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Schmidt decomposition across `part` (default: first system) and the rest.

    Returns:
    --------
    tuple
        (coefficients, basis of `part` as columns, basis of the rest as columns)
    """
    part = as_labels(part) or psi.labels[:1]
    rest = [label for label in psi.labels if label not in part]
    d_part = psi.space.dim_of(part)
    mat = _reorder_vector(psi.amplitudes, psi.space, list(part) + rest).reshape(d_part, -1)
    left, coeffs, right_h = np.linalg.svd(mat, full_matrices=False)
    return coeffs, left, right_h.T


def uhlmann_isometry(psi: PureState, phi: PureState, shared: Labels = None) -> LinearOp:
    """
    Partial isometry V^{B->C} with |<phi|V|psi>| = F(psi^S, phi^S).

    Parameters:
    -----------
    psi : PureState
        Purification over S and B.
    phi : PureState
        Purification over S and C.
    shared : labels, optional
        The purified systems S; defaults to the labels the two states share.

    Returns:
    --------
    LinearOp
        Polar isometry of the cross-overlap operator (kernel completed by
        the SVD).
    """
    shared = as_labels(shared) or tuple(label for label in psi.labels if label in phi.space)
    s_psi, s_phi = psi.space.sub(shared), phi.space.sub(shared)
    if s_psi.dims != s_phi.dims:
        raise ValueError("Purifications disagree on the dimensions of the shared systems.")
    b_space, c_space = psi.space.without(shared), phi.space.without(shared)
    psi_m = _reorder_vector(psi.amplitudes, psi.space, shared + b_space.labels).reshape(s_psi.dim, b_space.dim)
    phi_m = _reorder_vector(phi.amplitudes, phi.space, shared + c_space.labels).reshape(s_phi.dim, c_space.dim)
    vmat, overlap = uhlmann_matrices(psi_m, phi_m)
    logger.debug("Uhlmann overlap %.12f", overlap)
    return LinearOp(b_space, c_space, vmat, partial_isometry=True)


# ---------------------------------------------------------------------------
# QOBJ-JSON
# ---------------------------------------------------------------------------

def encode_matrix(mat: np.ndarray) -> list:
    mat = np.atleast_2d(np.asarray(mat, dtype=complex))
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


def decode_matrix(data: list) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError("Matrices must be encoded as rows of [re, im] pairs.")
    return arr[..., 0] + 1j * arr[..., 1]


def qobj_to_dict(x: Union[PureState, DensityOperator, LinearOp]) -> dict:
    if isinstance(x, PureState):
        return {"labels": [list(s) for s in x.space.systems], "kind": "pure",
                "matrix": encode_matrix(x.amplitudes.reshape(-1, 1))}
    if isinstance(x, DensityOperator):
        return {"labels": [list(s) for s in x.space.systems], "kind": "density",
                "matrix": encode_matrix(x.matrix)}
    if isinstance(x, LinearOp):
        return {"labels": [list(s) for s in x.in_space.systems],
                "out_labels": [list(s) for s in x.out_space.systems],
                "kind": "op", "matrix": encode_matrix(x.matrix)}
    raise ValueError(f"Cannot encode objects of type {type(x).__name__}.")


def qobj_from_dict(data: dict) -> Union[PureState, DensityOperator, LinearOp]:
    try:
        space = LabeledSpace(tuple((label, dim) for label, dim in data["labels"]))
        kind = data["kind"]
        mat = decode_matrix(data["matrix"])
    except (KeyError, TypeError) as e:
        raise ValueError(f"Malformed QOBJ-JSON document: {e}") from e
    if kind == "pure":
        return PureState(space, mat.reshape(-1))
    if kind == "density":
        return DensityOperator(space, mat)
    if kind == "op":
        out = LabeledSpace(tuple((label, dim) for label, dim in data.get("out_labels", data["labels"])))
        return LinearOp(space, out, mat)
    raise ValueError(f"Unknown QOBJ kind {kind!r}.")


def load_qobj(path: str) -> Union[PureState, DensityOperator, LinearOp]:
    with open(path) as f:
        return qobj_from_dict(json.load(f))


def save_qobj(x: Union[PureState, DensityOperator, LinearOp], path: str) -> None:
    with open(path, "w") as f:
        json.dump(qobj_to_dict(x), f)


if __name__ == "__main__":
    try:
        phi = maximally_entangled("A", "B", 2)
        print("\nRunning test cases...")
        print(f"Marginal of Phi: {np.round(marginal(phi, 'A').matrix.real, 6).tolist()}")
        print(f"F(pi, |0>): {fidelity(maximally_mixed(LabeledSpace.of(A=2)), basis_state(LabeledSpace.of(A=2))):.10f}")

        rho = DensityOperator(LabeledSpace.of(A=2), np.diag([0.75, 0.25]))
        sigma = DensityOperator(LabeledSpace.of(A=2), np.diag([0.25, 0.75]))
        p_guess, _ = helstrom(rho, sigma)
        print(f"Helstrom guessing probability: {p_guess:.10f}")

        psi, chi = purify(rho, "R"), purify(rho, "S", dim=3)
        v = uhlmann_isometry(psi, chi)
        overlap = abs(np.vdot(chi.amplitudes, reorder(apply_op(v, psi), chi.labels).amplitudes))
        print(f"Uhlmann overlap for equal marginals: {overlap:.10f}")
        print("--------------------------------")
    except ValueError as e:
        print(f"Error: {str(e)}")
    except Exception as e:
        print(f"An unexpected error occurred: {str(e)}")
