import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.linalg import hadamard
from scipy.stats import entropy as shannon

from .entropies import eta
from .randomness import SeededSampler, _as_sampler, haar_matrix
from .tensor_core import DERIVED_TOL, DensityOperator, LabeledSpace, helstrom, ptrace_matrix, trace_norm

logger = logging.getLogger(__name__)

HYPOTHESIS_EPS = np.exp(-2)


@dataclass(frozen=True, eq=False)
class LockingScheme:
    """
    N encoded states rho_m^{CK}. The cyphertext is C, the key K.

    Pairwise trace distances must equal 2 (perfect distinguishability with
    the key).
    """
    space: LabeledSpace
    states: np.ndarray
    unitary: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.space.labels != ("C", "K"):
            raise ValueError("A locking scheme lives on the systems C and K.")
        states = np.asarray(self.states, dtype=complex)
        if states.ndim != 3 or states.shape[1:] != (self.space.dim, self.space.dim):
            raise ValueError(f"States must be an (N, {self.space.dim}, {self.space.dim}) array.")
        object.__setattr__(self, "states", states)
        distance = self.pairwise_min_distance()
        if distance < 2 - DERIVED_TOL:
            raise ValueError(f"Encoded states must be perfectly distinguishable, min distance {distance:.10f} < 2.")

    @property
    def n_messages(self) -> int:
        return self.states.shape[0]

    @property
    def dim_c(self) -> int:
        return self.space.dim_of("C")

    @property
    def dim_k(self) -> int:
        return self.space.dim_of("K")

    def cyphertexts(self) -> np.ndarray:
        """rho_m^C for every message, shape (N, |C|, |C|)."""
        return np.stack([ptrace_matrix(rho, self.space, ("C",)) for rho in self.states])

    def omega(self) -> DensityOperator:
        """omega^{MC} = (1/N) sum_m |m><m| x rho_m^C."""
        n = self.n_messages
        blocks = np.zeros((n, self.dim_c, n, self.dim_c), dtype=complex)
        for m, rho in enumerate(self.cyphertexts()):
            blocks[m, :, m, :] = rho / n
        space = LabeledSpace.of(M=n).concat(self.space.sub("C"))
        return DensityOperator(space, blocks.reshape(space.dim, space.dim))

    def pairwise_min_distance(self) -> float:
        if self.n_messages < 2:
            return 2.0
        return min(trace_norm(self.states[i] - self.states[j]) for i, j in combinations(range(self.n_messages), 2))

    def key_guess_probability(self) -> float:
        """Smallest Helstrom guessing probability over pairs of encoded states."""
        if self.n_messages < 2:
            return 1.0
        rhos = [DensityOperator(self.space, rho) for rho in self.states]
        return min(helstrom(rhos[i], rhos[j])[0] for i, j in combinations(range(self.n_messages), 2))

    def to_dict(self) -> dict:
        return {
            "messages": self.n_messages,
            "dim_c": self.dim_c,
            "dim_k": self.dim_k,
            "pairwise_min_distance": self.pairwise_min_distance(),
        }


def _space(dim_c: int, dim_k: int) -> LabeledSpace:
    if dim_c < 1 or dim_k < 1:
        raise ValueError("Dimensions |C| and |K| must be positive.")
    return LabeledSpace.of(C=dim_c, K=dim_k)


def build_scheme(n_messages: int, dim_c: int, dim_k: int,
                 sampler: Union[SeededSampler, int, None] = None) -> LockingScheme:
    """
    Embed N messages into CK with a Haar-random unitary.

    Parameters:
    -----------
    n_messages : int
        Number of classical messages N.
    dim_c : int
        Cyphertext dimension |C|.
    dim_k : int
        Key dimension |K|.
    sampler : SeededSampler or int
        Stream for the unitary.

    Returns:
    --------
    LockingScheme
        rho_m^{CK} = U|m><m|U^dagger for the first N basis vectors.
    """
    space = _space(dim_c, dim_k)
    if n_messages < 1:
        raise ValueError("Number of messages must be positive.")
    if n_messages > space.dim:
        raise ValueError(f"Cannot embed N = {n_messages} messages into |C||K| = {space.dim} dimensions.")
    u = haar_matrix(space.dim, _as_sampler(sampler))
    vectors = u[:, :n_messages].T
    states = np.einsum("mi,mj->mij", vectors, vectors.conj())
    return LockingScheme(space, states, u)


def from_states(states: Sequence[np.ndarray], dim_c: int, dim_k: int) -> LockingScheme:
    """Scheme from explicit rho_m^{CK} (vectors are turned into projectors)."""
    space = _space(dim_c, dim_k)
    mats = []
    for state in states:
        state = np.asarray(state, dtype=complex)
        mats.append(np.outer(state, state.conj()) if state.ndim == 1 else state)
    return LockingScheme(space, np.stack(mats))


def mub_scheme(n_bits: int) -> LockingScheme:
    """
    One-bit-key baseline: each n-bit message goes in the computational or the
    Hadamard basis, the key bit says which.
    """
    if n_bits < 1:
        raise ValueError("Number of message bits must be positive.")
    d = 2 ** n_bits
    h = hadamard(d) / np.sqrt(d)
    key = np.eye(2)
    states = []
    for m in range(d):
        comp = np.zeros(d)
        comp[m] = 1.0
        had = h[:, m]
        states.append((np.kron(np.outer(comp, comp), np.outer(key[0], key[0]))
                       + np.kron(np.outer(had, had), np.outer(key[1], key[1]))) / 2)
    return LockingScheme(_space(d, 2), np.stack(states))


# ---------------------------------------------------------------------------
# measurement search
# ---------------------------------------------------------------------------

def _joint(cyphertexts: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """p(m, x) = <b_x| rho_m^C |b_x> / N."""
    n = cyphertexts.shape[0]
    return np.einsum("ix,mij,jx->mx", basis.conj(), cyphertexts, basis).real / n


def criterion(scheme: LockingScheme, basis: np.ndarray) -> float:
    """|| M(omega^{MC}) - M(pi^C) x omega^M ||_1 for the measurement in `basis` (columns)."""
    basis = np.asarray(basis, dtype=complex)
    if basis.shape != (scheme.dim_c, scheme.dim_c) or not np.allclose(basis.conj().T @ basis, np.eye(scheme.dim_c),
                                                                       atol=DERIVED_TOL):
        raise ValueError(f"A complete measurement on C needs a {scheme.dim_c} x {scheme.dim_c} unitary basis.")
    p = _joint(scheme.cyphertexts(), basis)
    return float(np.abs(p - 1.0 / (scheme.n_messages * scheme.dim_c)).sum())


def _ascend(cyphertexts: np.ndarray, basis: np.ndarray, iterations: int, rng: np.random.Generator) -> Tuple[float, np.ndarray]:
    """Random Givens rotations on pairs of basis vectors, kept when the criterion grows."""
    n, d = cyphertexts.shape[0], basis.shape[0]
    target = 1.0 / (n * d)
    p = _joint(cyphertexts, basis)
    value = np.abs(p - target).sum()
    if d < 2:
        return float(value), basis
    step, rejected = np.pi / 4, 0
    for _ in range(iterations):
        i, j = rng.choice(d, size=2, replace=False)
        theta, phi = rng.normal(0.0, step), rng.uniform(0.0, 2 * np.pi)
        c, s = np.cos(theta), np.sin(theta)
        rotation = np.array([[c, -np.exp(1j * phi) * s], [np.exp(-1j * phi) * s, c]])
        cols = basis[:, [i, j]] @ rotation
        new = np.einsum("ix,mij,jx->mx", cols.conj(), cyphertexts, cols).real / n
        gain = np.abs(new - target).sum() - np.abs(p[:, [i, j]] - target).sum()
        if gain > 0:
            basis = basis.copy()
            basis[:, [i, j]] = cols
            p[:, [i, j]] = new
            value += gain
            rejected = 0
        else:
            rejected += 1
            if rejected > 2 * d:
                step, rejected = max(step / 2, 1e-4), 0
    return float(value), basis


def leakage(scheme: LockingScheme, restarts: int = 16, iterations: int = 200,
            sampler: Union[SeededSampler, int, None] = None) -> Tuple[float, np.ndarray]:
    """
    Largest locking criterion found over complete orthonormal measurements on C.

    Parameters:
    -----------
    scheme : LockingScheme
    restarts : int
        Haar-random starting bases; restart i uses child stream i.
    iterations : int
        Givens proposals per restart.

    Returns:
    --------
    tuple
        (value, basis) where value is a lower bound on the supremum over all
        complete measurements and basis holds the measurement vectors as columns.
    """
    if restarts < 1 or iterations < 0:
        raise ValueError("Restarts must be positive and iterations non-negative.")
    sampler = _as_sampler(sampler)
    cyphertexts = scheme.cyphertexts()
    best_value, best_basis = -1.0, None
    for i in range(restarts):
        stream = sampler.spawn(i)
        start = haar_matrix(scheme.dim_c, stream)
        value, basis = _ascend(cyphertexts, start, iterations, stream.rng)
        logger.debug("Restart %d: criterion %.8f", i, value)
        if value > best_value:
            best_value, best_basis = value, basis
    logger.info("Searched leakage over %d restarts: %.8f", restarts, best_value)
    return best_value, best_basis


def measurement_information(scheme: LockingScheme, basis: np.ndarray) -> float:
    """Classical mutual information I(M;X) in bits of the measurement outcome with the message."""
    p = np.clip(_joint(scheme.cyphertexts(), np.asarray(basis, dtype=complex)), 0.0, None)
    return float(shannon(p.sum(axis=1), base=2) + shannon(p.sum(axis=0), base=2) - shannon(p.reshape(-1), base=2))


# ---------------------------------------------------------------------------
# formulas
# ---------------------------------------------------------------------------

def key_requirement(n_messages: float, eps: float) -> float:
    """
    Key dimension sufficient for 7 eps-locking: (32/eps) sqrt(log(4N^2/eps) ln(1/eps)).

    The guarantee needs N >= 8 sqrt(2)/eps and eps <= e^{-2}; violations are
    logged, the formula is still evaluated.
    """
    if not 0 < eps < 1:
        raise ValueError("Locking parameter eps must be in (0, 1).")
    if n_messages < 1:
        raise ValueError("Number of messages must be positive.")
    if eps > HYPOTHESIS_EPS:
        logger.warning("eps = %.4g exceeds e^-2; the locking guarantee does not apply.", eps)
    if n_messages < 8 * np.sqrt(2) / eps:
        logger.warning("N = %.4g is below 8 sqrt(2)/eps; the locking guarantee does not apply.", n_messages)
    log_term = 2 + 2 * np.log2(float(n_messages)) - np.log2(eps)
    return float(32 / eps * np.sqrt(log_term * np.log(1 / eps)))


def accessible_info_bound(eps_lock: float, n_messages: int) -> float:
    """
    I_acc(M;C) <= eps log N + 2 eta(1 - eps) + 2 eta(eps) for an eps-locking scheme.

    For eps > 1 the inequality is vacuous and log N is returned.
    """
    if eps_lock < 0:
        raise ValueError("Locking parameter must be non-negative.")
    if n_messages < 1:
        raise ValueError("Number of messages must be positive.")
    log_n = float(np.log2(n_messages))
    if eps_lock > 1:
        logger.warning("Leakage %.4f exceeds 1; only the trivial bound log N applies.", eps_lock)
        return log_n
    return min(log_n, eps_lock * log_n + 2 * eta(1 - eps_lock) + 2 * eta(eps_lock))


def qkd_iacc_bound(eps: float, n: int) -> float:
    """Accessible information on an n-bit key: 2 eps n + 2 eta(1 - 2 eps) + 2 eta(2 eps)."""
    if not 0 <= eps <= 0.5:
        raise ValueError("eps must be between 0 and 1/2.")
    if n < 1:
        raise ValueError("Key length n must be positive.")
    return 2 * eps * n + 2 * eta(1 - 2 * eps) + 2 * eta(2 * eps)


def quasi_check(vectors: np.ndarray, n: int, k: float, dim_c: Optional[int] = None) -> bool:
    """
    Whether unit vectors psi_1..psi_n (rows) form an (n, k)-quasi-measurement:
    (|C|/n) sum_x |psi_x><psi_x| <= k I.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
    if vectors.shape[0] != n:
        raise ValueError(f"Expected n = {n} vectors, got {vectors.shape[0]}.")
    if not np.allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=DERIVED_TOL):
        raise ValueError("Quasi-measurement vectors must have unit norm.")
    dim_c = dim_c or vectors.shape[1]
    frame = dim_c / n * vectors.T @ vectors.conj()
    return bool(np.linalg.eigvalsh(frame)[-1] <= k + DERIVED_TOL)


def quasi_bound(k: float, dim_k: int, n_messages: Optional[int] = None, r: float = 0.0) -> Tuple[float, float]:
    """
    Expected criterion 2^{log k / 2 - log|K| / 2} for an (n, k)-quasi-measurement and the
    probability 2 exp(-N^2 r^2 / 16 k^2) of exceeding it by r.
    """
    if k <= 0 or dim_k < 1:
        raise ValueError("k and |K| must be positive.")
    mean = float(np.sqrt(k / dim_k))
    if n_messages is None or r <= 0:
        return mean, 1.0
    return mean, float(min(1.0, 2 * np.exp(-n_messages ** 2 * r ** 2 / (16 * k ** 2))))


def quasi_range(n_messages: float, dim_c: int, eps: float) -> Tuple[float, float]:
    """
    Admissible number n of quasi-measurement vectors,
    2|C| log(4|C|^2/eps) <= n <= N^2 eps^2 / (512 |C| ln(1/eps)). Empty when low > high.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1).")
    low = 2 * dim_c * np.log2(4 * dim_c ** 2 / eps)
    high = float(n_messages) ** 2 * eps ** 2 / (512 * dim_c * np.log(1 / eps))
    if low > high:
        logger.info("Quasi-measurement range is empty for N = %.4g, |C| = %d", n_messages, dim_c)
    return float(low), float(high)


def key_scan(n_messages: int, total_dim: int, dims_k: Sequence[int] = (1, 2, 4), schemes: int = 10,
             restarts: int = 16, iterations: int = 200,
             sampler: Union[SeededSampler, int, None] = None) -> pd.DataFrame:
    """
    Searched leakage for several key sizes at fixed |C||K|. Scheme s uses child
    stream s for every key size, so the schemes are matched across rows.
    """
    sampler = _as_sampler(sampler)
    rows = []
    for dim_k in dims_k:
        if total_dim % dim_k:
            raise ValueError(f"Key dimension {dim_k} does not divide |C||K| = {total_dim}.")
        for s in range(schemes):
            stream = sampler.spawn(s)
            scheme = build_scheme(n_messages, total_dim // dim_k, dim_k, stream.spawn(0))
            value, basis = leakage(scheme, restarts, iterations, stream.spawn(1))
            rows.append({"dim_k": dim_k, "scheme": s, "leakage": value,
                         "information": measurement_information(scheme, basis),
                         "iacc_bound": accessible_info_bound(value, n_messages)})
    return pd.DataFrame(rows)


if __name__ == "__main__":
    try:
        print("\nRunning test cases...")
        cases = [
            {"n_messages": 4, "dim_c": 1, "dim_k": 4},
            {"n_messages": 4, "dim_c": 4, "dim_k": 1},
            {"n_messages": 16, "dim_c": 8, "dim_k": 2},
        ]
        for case in cases:
            scheme = build_scheme(**case, sampler=SeededSampler(7))
            value, basis = leakage(scheme, restarts=8, iterations=200, sampler=SeededSampler(8))
            print(f"\nResults for {case}")
            print(f"Pairwise min distance: {scheme.pairwise_min_distance():.10f}")
            print(f"Searched leakage: {value:.6f}")
            print(f"Mutual information of best measurement: {measurement_information(scheme, basis):.6f}")
            print(f"Accessible information bound: {accessible_info_bound(value, case['n_messages']):.6f}")
            print("--------------------------------")

        mub = mub_scheme(3)
        value, basis = leakage(mub, restarts=4, iterations=100)
        print(f"MUB baseline: leakage {value:.6f}, information {measurement_information(mub, np.eye(8)):.6f}")
        print(f"Key requirement for N = 2^64, eps = 0.01: {key_requirement(2.0 ** 64, 0.01):.2f}")
        print(f"Quasi-measurement range at N = 2^64, |C| = 2^10, eps = 0.01: {quasi_range(2.0 ** 64, 2 ** 10, 0.01)}")
    except ValueError as e:
        print(f"Error: {str(e)}")
    except Exception as e:
        print(f"An unexpected error occurred: {str(e)}")
