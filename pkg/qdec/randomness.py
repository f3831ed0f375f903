import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Tuple, Union

import numpy as np

from .tensor_core import DensityOperator, LabeledSpace, LinearOp, PureState

logger = logging.getLogger(__name__)


@dataclass
class SeededSampler:
    """
    Reproducible random stream. Identical (seed, key) pairs give identical
    sample streams; `spawn` derives independent child streams.

    A sampler is owned by one consumer at a time.
    """
    seed: int = 0
    algorithm: str = "PCG64"
    key: Tuple[int, ...] = ()
    counter: int = 0
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("Seed must be a 64-bit non-negative integer.")
        if self.algorithm != "PCG64":
            raise ValueError(f"Unsupported bit generator {self.algorithm!r}.")
        sequence = np.random.SeedSequence(int(self.seed), spawn_key=tuple(self.key))
        self._rng = np.random.Generator(np.random.PCG64(sequence))

    @property
    def rng(self) -> np.random.Generator:
        self.counter += 1
        return self._rng

    def spawn(self, key: int) -> "SeededSampler":
        return SeededSampler(self.seed, self.algorithm, tuple(self.key) + (int(key),))

    def ginibre(self, rows: int, cols: int) -> np.ndarray:
        rng = self.rng
        return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def _as_sampler(sampler: Union[SeededSampler, int, None]) -> SeededSampler:
    if isinstance(sampler, SeededSampler):
        return sampler
    return SeededSampler(0 if sampler is None else int(sampler))


def haar_matrix(d: int, sampler: Union[SeededSampler, int, None] = None) -> np.ndarray:
    """Haar-random d x d unitary: QR of a Ginibre matrix with the phases of R's diagonal removed."""
    if d < 1:
        raise ValueError("Dimension d must be at least 1.")
    q, r = np.linalg.qr(_as_sampler(sampler).ginibre(d, d))
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_unitary(space: Union[LabeledSpace, int], sampler: Union[SeededSampler, int, None] = None) -> LinearOp:
    """
    Sample a unitary from the Haar measure.

    Parameters:
    -----------
    space : LabeledSpace or int
        Space acted upon; an integer d stands for a single system 'A' of dimension d.
    sampler : SeededSampler or int
        Random stream (an integer is used as a seed).

    Returns:
    --------
    LinearOp
        Unitary on `space`.
    """
    if isinstance(space, (int, np.integer)):
        if space < 1:
            raise ValueError("Dimension d must be at least 1.")
        space = LabeledSpace.of(A=int(space))
    return LinearOp(space, space, haar_matrix(space.dim, sampler), partial_isometry=True)


def swap_matrix(d: int) -> np.ndarray:
    idx = np.arange(d * d)
    swap = np.zeros((d * d, d * d))
    swap[(idx % d) * d + idx // d, idx] = 1.0
    return swap


def swap_operator(d: int, labels: Tuple[str, str] = ("A", "A'")) -> LinearOp:
    """F|i>|j> = |j>|i> on two copies of a d-dimensional system."""
    if d < 1:
        raise ValueError("Dimension d must be at least 1.")
    space = LabeledSpace(((labels[0], d), (labels[1], d)))
    return LinearOp(space, space, swap_matrix(d), partial_isometry=True)


def second_moment_coefficients(m: np.ndarray, d: int) -> Tuple[float, float]:
    """
    (alpha, beta) with E_U[U^{x2} M U^{dag x2}] = alpha I + beta F.

    At d = 1 the identity and the swap coincide; alpha carries tr M and beta is 0.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (d * d, d * d):
        raise ValueError(f"Operator must act on two copies of a {d}-dimensional system.")
    t = np.trace(m)
    if d == 1:
        return complex(t), 0.0
    f = np.trace(m @ swap_matrix(d))
    alpha = (t - f / d) / (d * d - 1)
    beta = (f - t / d) / (d * d - 1)
    return alpha, beta


def haar_second_moment(m: Union[np.ndarray, LinearOp], d: int = None) -> Union[np.ndarray, LinearOp]:
    """
    Closed-form Haar twirl of an operator on A x A.

    Parameters:
    -----------
    m : ndarray or LinearOp
        Square operator on the doubled space.
    d : int, optional
        Dimension of one copy; inferred from the shape when omitted.

    Returns:
    --------
    Same kind as `m`
        alpha I + beta F.
    """
    mat = m.matrix if isinstance(m, LinearOp) else np.asarray(m, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("Second moment needs a square operator.")
    if d is None:
        d = int(round(np.sqrt(mat.shape[0])))
    alpha, beta = second_moment_coefficients(mat, d)
    moment = alpha * np.eye(d * d) + beta * swap_matrix(d)
    if isinstance(m, LinearOp):
        return LinearOp(m.in_space, m.out_space, moment)
    return moment


_H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
_S = np.diag([1, 1j])
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def _phase_key(u: np.ndarray) -> bytes:
    flat = u.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat) > 1e-9)]
    canon = flat * (np.conj(pivot) / abs(pivot))
    return (np.round(canon, 8) + 0.0).tobytes()


@lru_cache(maxsize=None)
def _clifford_elements(n_qubits: int) -> Tuple[np.ndarray, ...]:
    if n_qubits == 1:
        generators = [_H, _S]
    else:
        eye = np.eye(2)
        generators = [np.kron(_H, eye), np.kron(eye, _H), np.kron(_S, eye), np.kron(eye, _S), _CNOT]
    start = np.eye(2 ** n_qubits, dtype=complex)
    seen = {_phase_key(start): start}
    frontier = [start]
    while frontier:
        fresh = []
        for u in frontier:
            for g in generators:
                v = g @ u
                key = _phase_key(v)
                if key not in seen:
                    seen[key] = v
                    fresh.append(v)
        frontier = fresh
    logger.debug("Enumerated %d Clifford elements on %d qubit(s)", len(seen), n_qubits)
    return tuple(seen.values())


def clifford_group(n_qubits: int) -> List[np.ndarray]:
    """All Clifford unitaries on 1 or 2 qubits modulo global phase (24 and 11520 elements)."""
    if n_qubits not in (1, 2):
        raise ValueError("Clifford sampling is available for 1 or 2 qubits only.")
    return list(_clifford_elements(n_qubits))


def clifford_sample(n_qubits: int, sampler: Union[SeededSampler, int, None] = None) -> LinearOp:
    """Uniformly random Clifford element on 1 or 2 qubits."""
    elements = clifford_group(n_qubits)
    u = elements[int(_as_sampler(sampler).rng.integers(len(elements)))]
    space = LabeledSpace.of(A=2 ** n_qubits)
    return LinearOp(space, space, u, partial_isometry=True)


def twirl(m: np.ndarray, unitaries: np.ndarray) -> np.ndarray:
    """Average of U^{x2} M U^{dag x2} over a stack of unitaries."""
    doubled = np.einsum("nij,nkl->nikjl", unitaries, unitaries).reshape(len(unitaries), m.shape[0], m.shape[0])
    return np.einsum("nab,bc,ndc->ad", doubled, m, doubled.conj(), optimize=True) / len(unitaries)


def clifford_moment_exact(m: np.ndarray, n_qubits: int) -> np.ndarray:
    """Exact group average of the second moment over the Clifford group."""
    return twirl(np.asarray(m, dtype=complex), np.array(clifford_group(n_qubits)))


def second_moment_mc(m: np.ndarray, d: int, samples: int, sampler: Union[SeededSampler, int, None] = None,
                     kind: str = "haar", batch: int = 2000) -> Tuple[np.ndarray, np.ndarray]:
    """
    Monte-Carlo estimate of E_U[U^{x2} M U^{dag x2}].

    Returns:
    --------
    tuple
        (mean matrix, entrywise standard error of the mean)
    """
    if samples < 2:
        raise ValueError("Number of samples must be at least 2.")
    if kind not in ("haar", "clifford"):
        raise ValueError("Sampler kind must be either 'haar' or 'clifford'.")
    sampler = _as_sampler(sampler)
    m = np.asarray(m, dtype=complex)
    total = np.zeros_like(m)
    total_sq = np.zeros(m.shape)
    drawn = 0
    while drawn < samples:
        size = min(batch, samples - drawn)
        if kind == "haar":
            us = np.array([haar_matrix(d, sampler) for _ in range(size)])
        else:
            n_qubits = int(round(np.log2(d)))
            us = np.array([clifford_sample(n_qubits, sampler).matrix for _ in range(size)])
        doubled = np.einsum("nij,nkl->nikjl", us, us).reshape(size, d * d, d * d)
        values = np.einsum("nab,bc,ndc->nad", doubled, m, doubled.conj(), optimize=True)
        total += values.sum(axis=0)
        total_sq += (np.abs(values) ** 2).sum(axis=0)
        drawn += size
    mean = total / samples
    variance = np.clip(total_sq / samples - np.abs(mean) ** 2, 0.0, None)
    return mean, np.sqrt(variance / (samples - 1))


def weyl_operators(d: int) -> List[np.ndarray]:
    """The d^2 Weyl operators X^a Z^b, ordered with a running fastest (d=2: I, X, Z, XZ)."""
    if d < 1:
        raise ValueError("Dimension d must be at least 1.")
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            for b in range(d) for a in range(d)]


def random_pure(space: LabeledSpace, sampler: Union[SeededSampler, int, None] = None) -> PureState:
    vec = _as_sampler(sampler).ginibre(space.dim, 1).reshape(-1)
    return PureState(space, vec / np.linalg.norm(vec))


def random_density(space: LabeledSpace, rank: int = None, sampler: Union[SeededSampler, int, None] = None) -> DensityOperator:
    """
    Random state induced by tracing out a rank-dimensional purifier of a
    Haar-random pure state.
    """
    rank = space.dim if rank is None else int(rank)
    if rank < 1:
        raise ValueError("Rank must be at least 1.")
    g = _as_sampler(sampler).ginibre(space.dim, rank)
    rho = g @ g.conj().T
    return DensityOperator(space, rho / np.trace(rho).real)


def chernoff_bound(d: int, n: int, k: float) -> float:
    return float(min(1.0, 2 * d * np.exp(-n * (k - 1) ** 2 / (d * 2 * np.log(2)))))


def chernoff_experiment(d: int, n: int, k: float, trials: int,
                        sampler: Union[SeededSampler, int, None] = None,
                        ensemble: Union[str, Callable[[SeededSampler], np.ndarray]] = "haar") -> Tuple[float, float]:
    """
    Operator Chernoff experiment for rank-one measurement ensembles.

    Y_j = d |psi_j><psi_j| with E[Y] = I; a trial fails when the empirical
    mean (1/n) sum_j Y_j is not below k I.

    Parameters:
    -----------
    d : int
        Dimension of the measured system.
    n : int
        Number of sampled vectors per trial.
    k : float
        Operator upper-bound factor.
    trials : int
        Number of independent trials.
    ensemble : str or callable
        'haar' for Haar-random vectors, or a function sampler -> unit vector.

    Returns:
    --------
    tuple
        (empirical violation rate, analytic bound 2d exp(-n(k-1)^2 / (2 d ln 2)))
    """
    if d < 1 or n < 1 or trials < 1:
        raise ValueError("Dimension, n and trials must be positive.")
    if k <= 0:
        raise ValueError("Bound factor k must be positive.")
    sampler = _as_sampler(sampler)
    draw = ensemble if callable(ensemble) else (lambda s: random_pure(LabeledSpace.of(C=d), s).amplitudes)
    failures = 0
    for _ in range(trials):
        vecs = np.array([draw(sampler) for _ in range(n)])
        mean = d * (vecs.T @ vecs.conj()) / n
        if np.linalg.eigvalsh(mean)[-1] > k + 1e-12:
            failures += 1
    return failures / trials, chernoff_bound(d, n, k)


if __name__ == "__main__":
    try:
        sampler = SeededSampler(5)
        print("\nRunning test cases...")
        for d in [1, 2, 4]:
            u = haar_unitary(d, sampler)
            print(f"d={d}: unitarity error {np.linalg.norm(u.matrix.conj().T @ u.matrix - np.eye(d)):.2e}")
        m = np.kron(np.diag([1, 0]), np.diag([1, 0]))
        err = np.abs(clifford_moment_exact(m, 1) - haar_second_moment(m, 2)).max()
        print(f"Single-qubit Clifford 2-design error: {err:.2e}")
        print(f"Clifford group sizes: {len(clifford_group(1))}, {len(clifford_group(2))}")
        rate, bound = chernoff_experiment(4, 64, 2, 200, sampler)
        print(f"Chernoff d=4, n=64, k=2: rate {rate:.4f} vs bound {bound:.4f}")
        print("--------------------------------")
    except ValueError as e:
        print(f"Error: {str(e)}")
    except Exception as e:
        print(f"An unexpected error occurred: {str(e)}")
