import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .channels import Channel, block_measurement, choi_state, from_matrices, isometry_channel
from .entropies import (alicki_fannes_bound, conditional_entropy, entropy, fannes_bound, h_2, smooth)
from .randomness import (SeededSampler, _as_sampler, clifford_sample, haar_matrix, random_density,
                         random_pure, swap_matrix, weyl_operators)
from .tensor_core import (DERIVED_TOL, DensityOperator, LabeledSpace, LinearOp, State, _reorder_matrix,
                          as_density, fidelity, marginal, psd_power, ptrace_matrix, trace_norm)

logger = logging.getLogger(__name__)

COROLLARIES = ("fqsw", "merge", "subspace", "projective_merge")
SMOOTH_PENALTY = 8.0
APPENDIX_TOL = 1e-9
CLIFFORD_CASES = (("fqsw", 2, None), ("merge", 2, None), ("subspace", 2, None), ("projective_merge", 1, 2))


@dataclass
class DecouplingExperiment:
    """
    Monte-Carlo record of E_U ||T(U rho^{AR} U^dagger) - omega^E x rho^R||_1
    against its analytic upper bound.
    """
    rho: DensityOperator
    channel: Channel
    sampler_kind: str
    n_samples: int
    values: np.ndarray
    rhs: float
    eps: float = 0.0
    closed_form_rhs: Optional[float] = None
    label: str = "custom"
    mean: float = field(init=False)
    max: float = field(init=False)
    std: float = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.mean = float(self.values.mean())
        self.max = float(self.values.max())
        self.std = float(self.values.std(ddof=1)) if self.values.size > 1 else 0.0

    @property
    def stderr(self) -> float:
        return self.std / np.sqrt(self.n_samples)

    def within_bound(self) -> bool:
        """Mean LHS below rhs up to three standard errors of Monte-Carlo noise."""
        return bool(self.mean <= self.rhs + 3 * self.stderr + DERIVED_TOL)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "sampler": self.sampler_kind,
            "n_samples": self.n_samples,
            "dim_in": self.channel.in_space.dim,
            "dim_out": self.channel.out_space.dim,
            "mean": self.mean,
            "max": self.max,
            "std": self.std,
            "rhs": self.rhs,
            "closed_form_rhs": self.closed_form_rhs,
            "eps": self.eps,
            "within_bound": self.within_bound(),
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"sample": np.arange(self.n_samples), "lhs": self.values})


# ---------------------------------------------------------------------------
# both sides of the decoupling inequality
# ---------------------------------------------------------------------------

def _check_input(rho: State, channel: Channel) -> Tuple[DensityOperator, Tuple[str, ...]]:
    rho = as_density(rho)
    in_labels = channel.in_space.labels
    missing = [label for label in in_labels if label not in rho.space]
    if missing:
        raise ValueError(f"The state carries no system {missing} for the channel input.")
    if rho.space.sub(in_labels).dims != channel.in_space.dims:
        raise ValueError("State and channel disagree on the input dimensions.")
    rest = tuple(label for label in rho.labels if label not in in_labels)
    return rho, rest


def rhs_terms(rho: State, channel: Channel, eps: float = 0.0) -> Dict[str, float]:
    """
    Entropic terms of the decoupling bound.

    Parameters:
    -----------
    rho : DensityOperator or PureState
        State on the channel input A and a reference R (every other system).
    channel : Channel
        Completely positive map T^{A->E}.
    eps : float
        Smoothing parameter; 0 gives the unsmoothed bound.

    Returns:
    --------
    dict
        h2_channel = H_2(A'|E) of the Choi state, h2_state = H_2(A|R) of rho
        (both certified lower bounds), and value = 2^{-(h2_channel + h2_state)/2}
        plus 8 eps when smoothing.
    """
    if not 0 <= eps <= 1:
        raise ValueError("Smoothing parameter eps must be between 0 and 1.")
    rho, rest = _check_input(rho, channel)
    omega = choi_state(channel, reference="~in")
    out_labels = channel.out_space.labels
    a_labels = channel.in_space.labels
    if eps > 0:
        h_channel = smooth("2", omega, eps, given=out_labels, of="~in").value
        h_state = smooth("2", rho, eps, given=rest, of=a_labels).value
    else:
        h_channel = h_2(omega, given=out_labels, of="~in").value
        h_state = h_2(rho, given=rest, of=a_labels).value
    value = 2.0 ** (-0.5 * (h_channel + h_state)) + SMOOTH_PENALTY * eps
    return {"h2_channel": h_channel, "h2_state": h_state, "value": float(value), "eps": eps}


def rhs(rho: State, channel: Channel, eps: float = 0.0) -> float:
    return rhs_terms(rho, channel, eps)["value"]


def _decoupling_target(rho: DensityOperator, channel: Channel, rest: Sequence[str]) -> np.ndarray:
    d_in = channel.in_space.dim
    s = channel.stack
    omega_e = np.einsum("kai,kbi->ab", s, s.conj()) / d_in
    rho_r = ptrace_matrix(rho.matrix, rho.space, rest) if rest else np.ones((1, 1))
    return np.kron(omega_e, rho_r)


def _sample_unitary(d: int, sampler: SeededSampler, kind: str) -> np.ndarray:
    if kind == "haar":
        return haar_matrix(d, sampler)
    return clifford_sample(int(round(np.log2(d))), sampler).matrix


def lhs_values(rho: State, channel: Channel, unitaries: Sequence[np.ndarray]) -> np.ndarray:
    """||T(U rho U^dagger) - omega^E x rho^R||_1 for each given unitary U on A."""
    rho, rest = _check_input(rho, channel)
    in_labels = channel.in_space.labels
    d_in = channel.in_space.dim
    d_rest = rho.space.dim // d_in
    ordered = _reorder_matrix(rho.matrix, rho.space, list(in_labels) + list(rest))
    ordered = ordered.reshape(d_in, d_rest, d_in, d_rest)
    target = _decoupling_target(rho, channel, rest)
    s = channel.stack
    d_out = channel.out_space.dim
    values = []
    for u in unitaries:
        w = s @ u
        out = np.einsum("kai,ibjc,kdj->abdc", w, ordered, w.conj(), optimize=True)
        values.append(trace_norm(out.reshape(d_out * d_rest, d_out * d_rest) - target))
    return np.array(values)


def lhs_mc(rho: State, channel: Channel, sampler: Union[SeededSampler, int, None] = None, n_samples: int = 500,
           kind: str = "haar", eps: float = 0.0, rhs_value: Optional[float] = None,
           label: str = "custom") -> DecouplingExperiment:
    """
    Monte-Carlo estimate of the decoupling LHS.

    Sample i draws its unitary from the child stream spawn(i), so the record
    does not depend on evaluation order.

    Parameters:
    -----------
    rho : DensityOperator or PureState
        State on A and the reference R.
    channel : Channel
        Map T^{A->E}, completely positive.
    sampler : SeededSampler or int
        Parent random stream.
    n_samples : int
        Number of sampled unitaries.
    kind : str
        'haar' or 'clifford' (|A| in {2, 4}).
    eps : float
        Smoothing parameter of the reported rhs.

    Returns:
    --------
    DecouplingExperiment
    """
    if n_samples < 1:
        raise ValueError("Number of samples must be at least 1.")
    if kind not in ("haar", "clifford"):
        raise ValueError("Sampler kind must be either 'haar' or 'clifford'.")
    d_in = channel.in_space.dim
    if kind == "clifford" and d_in not in (2, 4):
        raise ValueError("Clifford sampling needs |A| to be 2 or 4.")
    rho, _ = _check_input(rho, channel)
    sampler = _as_sampler(sampler)
    unitaries = [_sample_unitary(d_in, sampler.spawn(i), kind) for i in range(n_samples)]
    values = lhs_values(rho, channel, unitaries)
    bound = rhs(rho, channel, eps) if rhs_value is None else float(rhs_value)
    experiment = DecouplingExperiment(rho, channel, kind, n_samples, values, bound, eps, label=label)
    logger.info("Decoupling %s (%s, n=%d): mean %.6f +- %.6f, rhs %.6f", label, kind, n_samples,
                experiment.mean, experiment.stderr, experiment.rhs)
    if not experiment.within_bound():
        logger.warning("Mean decoupling distance %.6f exceeds the bound %.6f beyond 3 standard errors",
                       experiment.mean, experiment.rhs)
    return experiment


# ---------------------------------------------------------------------------
# concentration
# ---------------------------------------------------------------------------

def channel_constant(channel: Channel) -> float:
    """K = max ||T(X)||_1 over ||X||_1 <= 1, which for a CP map is ||sum_i N_i^dagger N_i||_inf."""
    s = channel.stack
    return float(np.linalg.eigvalsh(np.einsum("kai,kaj->ij", s.conj(), s))[-1])


def concentration(rho: State, channel: Channel, n_samples: int, r: float,
                  sampler: Union[SeededSampler, int, None] = None) -> Tuple[float, float]:
    """
    Tail of the decoupling distance above rhs + r, over Haar samples only.

    Returns:
    --------
    tuple
        (empirical fraction of samples exceeding rhs + r,
         analytic bound 2 exp(-|A| r^2 / (16 K^2 ||rho^A||_inf)))
        Both are 0 when rhs + r reaches 2, the largest possible distance.
    """
    if r < 0:
        raise ValueError("Deviation r must be non-negative.")
    rho, _ = _check_input(rho, channel)
    threshold = rhs(rho, channel) + r
    experiment = lhs_mc(rho, channel, sampler, n_samples, "haar", rhs_value=threshold - r, label="concentration")
    tail = float(np.mean(experiment.values > threshold))
    if threshold >= 2:
        return tail, 0.0
    k = channel_constant(channel)
    rho_a = marginal(rho, channel.in_space.labels)
    norm_a = float(rho_a.eigenvalues()[-1])
    bound = 2 * np.exp(-channel.in_space.dim * r ** 2 / (16 * k ** 2 * norm_a))
    return tail, float(min(1.0, bound))


# ---------------------------------------------------------------------------
# corollaries
# ---------------------------------------------------------------------------

def _basis_bra(d: int, j: int) -> np.ndarray:
    bra = np.zeros((1, d))
    bra[0, j] = 1.0
    return bra


def corollary_channel(kind: str, dim_a: int, dim_e: int, dim_e2: Optional[int] = None) -> Tuple[Channel, float]:
    """
    The map T of a decoupling corollary on input label A, with the factor c
    of its closed-form bound sqrt(c 2^{-H_2(A|R)}).

    fqsw: tr_{A2} with |A1| = dim_e, c = |A1|/|A2|.
    merge: |A|/|E| orthogonal rank-|E| blocks recorded in X, c = |E|. The
    blocks are computational-basis projectors rather than Weyl-block
    isometries; both give the same 2^{-H_2(A|E)} of the Choi state, so the
    closed form and rhs do not change.
    subspace: (|A|/|E|) V.sigma for a rank-|E| partial isometry V, c = |E|.
    projective_merge: (|A|/|E|) tr_{E2}[V.sigma] with E = E1 E2, |E1| = dim_e,
    |E2| = dim_e2, c = |E1|/|E2|.
    """
    if kind not in COROLLARIES:
        raise ValueError(f"Corollary kind must be one of {COROLLARIES}.")
    if dim_a < 1 or dim_e < 1:
        raise ValueError("Dimensions must be positive.")
    a_space = LabeledSpace.of(A=dim_a)
    if kind == "fqsw":
        if dim_a % dim_e:
            raise ValueError("|A| must be divisible by |A1| to split A into A1 A2.")
        dim_a2 = dim_a // dim_e
        mats = [np.kron(np.eye(dim_e), _basis_bra(dim_a2, j)) for j in range(dim_a2)]
        return from_matrices(a_space, LabeledSpace.of(A1=dim_e), mats), dim_e / dim_a2
    if kind == "merge":
        return block_measurement(dim_a, dim_e), float(dim_e)
    if kind == "subspace":
        if dim_e > dim_a:
            raise ValueError("The partial isometry needs |E| <= |A|.")
        v = LinearOp(a_space, LabeledSpace.of(E=dim_e), np.eye(dim_e, dim_a))
        return isometry_channel(v, scale=dim_a / dim_e), float(dim_e)
    if dim_e2 is None or dim_e2 < 1:
        raise ValueError("Projective merging needs a positive |E2|.")
    dim_full = dim_e * dim_e2
    if dim_full > dim_a:
        raise ValueError("The partial isometry needs |E1||E2| <= |A|.")
    v = np.eye(dim_full, dim_a)
    scale = np.sqrt(dim_a / dim_full)
    mats = [scale * np.kron(np.eye(dim_e), _basis_bra(dim_e2, j)) @ v for j in range(dim_e2)]
    return from_matrices(a_space, LabeledSpace.of(E1=dim_e), mats), dim_e / dim_e2


def closed_form_rhs(rho: State, kind: str, dim_a: int, dim_e: int, dim_e2: Optional[int] = None) -> float:
    _, factor = corollary_channel(kind, dim_a, dim_e, dim_e2)
    rho = as_density(rho)
    rest = tuple(label for label in rho.labels if label != "A")
    h_state = h_2(rho, given=rest, of="A").value
    return float(np.sqrt(factor * 2.0 ** -h_state))


def corollary_run(kind: str, dim_a: int = 4, dim_e: int = 2, dim_r: int = 2, rho: Optional[State] = None,
                  dim_e2: Optional[int] = None, n_samples: int = 500,
                  sampler: Union[SeededSampler, int, None] = None, sampler_kind: str = "haar",
                  eps: float = 0.0) -> DecouplingExperiment:
    """
    Run a decoupling corollary end to end.

    Parameters:
    -----------
    kind : str
        'fqsw', 'merge', 'subspace' or 'projective_merge'.
    dim_a : int
        Input dimension |A|; taken from rho when a state is given.
    dim_e : int
        |A1| for fqsw, |E| for merge and subspace, |E1| for projective_merge.
    dim_r : int
        Reference dimension of the random pure state drawn when rho is None.
    rho : DensityOperator or PureState, optional
        Input state with the channel input labelled 'A'.
    dim_e2 : int, optional
        |E2| for projective_merge.
    n_samples, sampler, sampler_kind, eps
        As in lhs_mc.

    Returns:
    --------
    DecouplingExperiment
        With both the generic rhs and the corollary's closed form.
    """
    sampler = _as_sampler(sampler)
    if rho is None:
        if dim_r < 1:
            raise ValueError("Reference dimension |R| must be positive.")
        rho = random_pure(LabeledSpace.of(A=dim_a, R=dim_r), sampler.spawn(0))
    rho = as_density(rho)
    if "A" not in rho.space:
        raise ValueError("Corollary runs need the channel input labelled 'A'.")
    dim_a = rho.space.dim_of("A")
    channel, _ = corollary_channel(kind, dim_a, dim_e, dim_e2)
    closed = closed_form_rhs(rho, kind, dim_a, dim_e, dim_e2)
    generic = rhs(rho, channel)
    if abs(closed - generic) > 1e-6 * max(1.0, closed):
        logger.warning("Closed-form rhs %.10f and generic rhs %.10f disagree for %s", closed, generic, kind)
    bound = generic if eps == 0 else rhs(rho, channel, eps)
    experiment = lhs_mc(rho, channel, sampler.spawn(1), n_samples, sampler_kind, eps, rhs_value=bound, label=kind)
    experiment.closed_form_rhs = closed
    return experiment


def sampler_agreement(n_samples: int = 200, dim_r: int = 2, sampler: Union[SeededSampler, int, None] = None,
                      cases: Sequence[Tuple[str, int, Optional[int]]] = CLIFFORD_CASES) -> pd.DataFrame:
    """
    Haar against two-qubit Clifford sampling on matched corollary instances.

    Each case draws one state rho^{AR} with |A| = 4 and runs the corollary
    with both samplers on independent streams.

    Parameters:
    -----------
    n_samples : int
        Samples per sampler.
    dim_r : int
        Reference dimension of the shared state.
    cases : sequence
        (corollary, dim_e, dim_e2) triples.

    Returns:
    --------
    pd.DataFrame
        One row per corollary with both means and standard deviations, the
        gap |mean_H - mean_C| and the tolerance 3 sqrt(s_H^2/n + s_C^2/n).
    """
    if n_samples < 2:
        raise ValueError("Comparing samplers needs at least 2 samples each.")
    sampler = _as_sampler(sampler)
    rows = []
    for i, (kind, dim_e, dim_e2) in enumerate(cases):
        stream = sampler.spawn(i)
        rho = random_pure(LabeledSpace.of(A=4, R=dim_r), stream.spawn(0))
        haar, clifford = (corollary_run(kind, dim_e=dim_e, dim_e2=dim_e2, rho=rho, n_samples=n_samples,
                                        sampler=stream.spawn(j), sampler_kind=name)
                          for j, name in ((1, "haar"), (2, "clifford")))
        gap = abs(haar.mean - clifford.mean)
        tolerance = 3 * np.sqrt(haar.std ** 2 / haar.n_samples + clifford.std ** 2 / clifford.n_samples)
        rows.append({"corollary": kind, "mean_haar": haar.mean, "std_haar": haar.std,
                     "mean_clifford": clifford.mean, "std_clifford": clifford.std, "gap": gap,
                     "tolerance": tolerance, "agree": bool(gap <= tolerance + DERIVED_TOL)})
        logger.info("Haar %.6f vs Clifford %.6f on %s (gap %.2e, tolerance %.2e)", haar.mean, clifford.mean,
                    kind, gap, tolerance)
    return pd.DataFrame(rows)


# ---------------------------------------------------------------------------
# destroying correlations with 2^k unitaries
# ---------------------------------------------------------------------------

def randomize_destroy(rho: State, k: int, eps: float, dim: Optional[int] = None, of: Optional[str] = None,
                      samples: int = 32,
                      sampler: Union[SeededSampler, int, None] = None) -> Tuple[List[LinearOp], float, float]:
    """
    Build 2^k unitaries whose uniform mixture nearly decouples A from B.

    U_i = V_i U with V_i the first 2^k Weyl operators of a D-dimensional
    subspace (identity elsewhere) and U the best of `samples` Haar draws.

    Parameters:
    -----------
    rho : DensityOperator or PureState
        State on A (label `of`, default the first system) and B (the rest).
    k : int
        Bits of randomness; 2^k <= D^2.
    eps : float
        Smoothing parameter. May be 0 only when dim is given.
    dim : int, optional
        Subspace dimension D; defaults to ceil(2^{H_max^eps(A) + 2 log(1/eps)}).

    Returns:
    --------
    tuple
        (2^k unitaries on A, residual ||2^{-k} sum_i U_i.rho - xi x rho^B||_1
         with xi = P/D, bound 2 sqrt(delta_1) + delta_2)
    """
    if k < 0:
        raise ValueError("Number of random bits k must be non-negative.")
    if not 0 <= eps < 1:
        raise ValueError("Smoothing parameter eps must be in [0, 1).")
    if eps == 0 and dim is None:
        raise ValueError("eps must be positive unless the subspace dimension D is given.")
    if samples < 1:
        raise ValueError("Number of samples must be at least 1.")
    rho = as_density(rho)
    a = of or rho.labels[0]
    rest = tuple(label for label in rho.labels if label != a)
    d_a = rho.space.dim_of(a)
    h_max_a = smooth("max", marginal(rho, a), eps).value
    h_2_ab = smooth("2", rho, eps, given=rest, of=a).value
    if dim is None:
        dim = int(np.ceil(2.0 ** (h_max_a + 2 * np.log2(1 / eps)) - DERIVED_TOL))
    if dim < 1 or dim > d_a:
        raise ValueError(f"Subspace dimension D = {dim} must satisfy 1 <= D <= |A| = {d_a}.")
    if 2 ** k > dim ** 2:
        raise ValueError(f"2^k = {2 ** k} Weyl operators do not fit on a subspace of dimension D = {dim}.")

    weyl = []
    for w in weyl_operators(dim)[:2 ** k]:
        v = np.eye(d_a, dtype=complex)
        v[:dim, :dim] = w
        weyl.append(v)
    xi = np.diag(np.r_[np.ones(dim), np.zeros(d_a - dim)]) / dim
    d_rest = rho.space.dim // d_a
    ordered = _reorder_matrix(rho.matrix, rho.space, (a,) + rest).reshape(d_a, d_rest, d_a, d_rest)
    rho_b = ptrace_matrix(rho.matrix, rho.space, rest) if rest else np.ones((1, 1))
    target = np.kron(xi, rho_b)
    stack = np.array(weyl)

    sampler = _as_sampler(sampler)
    best_u, residual = None, np.inf
    for s in range(samples):
        u = haar_matrix(d_a, sampler.spawn(s))
        w = stack @ u
        mixed = np.einsum("kai,ibjc,kdj->abdc", w, ordered, w.conj(), optimize=True) / len(weyl)
        value = trace_norm(mixed.reshape(d_a * d_rest, d_a * d_rest) - target)
        if value < residual:
            best_u, residual = u, value

    log_d = np.log2(dim)
    delta_1 = 3 * 2.0 ** (0.5 * h_max_a - 0.5 * log_d) + 24 * eps
    delta_2 = 3 * 2.0 ** (-0.5 * h_2_ab + 0.5 * log_d - 0.5 * k) + 24 * eps
    bound = 2 * np.sqrt(delta_1) + delta_2
    space = rho.space.sub(a)
    unitaries = [LinearOp(space, space, v @ best_u, partial_isometry=True) for v in weyl]
    logger.info("Randomization with k=%d on D=%d: residual %.6f, bound %.6f", k, dim, residual, bound)
    return unitaries, float(residual), float(bound)


# ---------------------------------------------------------------------------
# appendix inequalities as randomized trials; each returns (lhs, rhs) with lhs <= rhs
# ---------------------------------------------------------------------------

def _random_matrix(sampler: SeededSampler, rows: int, cols: int = None) -> np.ndarray:
    return sampler.ginibre(rows, rows if cols is None else cols)


def _random_hermitian(sampler: SeededSampler, d: int) -> np.ndarray:
    g = sampler.ginibre(d, d)
    return (g + g.conj().T) / 2


def _perturbed(rho: DensityOperator, sampler: SeededSampler, max_distance: float) -> DensityOperator:
    """A state on rho's space within trace distance max_distance of rho."""
    other = random_density(rho.space, sampler=sampler)
    gap = trace_norm(other.matrix - rho.matrix)
    t = min(1.0, max_distance / gap) * sampler.rng.uniform() if gap > 0 else 0.0
    return DensityOperator(rho.space, (1 - t) * rho.matrix + t * other.matrix)


def swap_trick_trial(sampler: SeededSampler, d: int = 3) -> Tuple[float, float]:
    m, n = _random_matrix(sampler, d), _random_matrix(sampler, d)
    swapped = np.trace(np.kron(m, n) @ swap_matrix(d))
    return float(abs(np.trace(m @ n) - swapped)), 0.0


def tr2_bounded_trial(sampler: SeededSampler, d_a: int = 2, d_b: int = 3) -> Tuple[float, float]:
    g = sampler.ginibre(d_a * d_b, d_a * d_b)
    xi = g @ g.conj().T
    xi_b = np.einsum("ijik->jk", xi.reshape(d_a, d_b, d_a, d_b))
    ratio = float(np.trace(xi @ xi).real / np.trace(xi_b @ xi_b).real)
    return max(ratio, 1 / ratio), float(d_a)


def pseudo_jensen_trial(sampler: SeededSampler, d: int = 3) -> Tuple[float, float]:
    m = _random_hermitian(sampler, d)
    g = sampler.ginibre(d, d)
    sigma = g @ g.conj().T + 1e-3 * np.eye(d)
    q, h = psd_power(sigma, -0.25), psd_power(sigma, -0.5)
    inner = np.trace(q @ m @ h @ m.conj().T @ q).real
    return trace_norm(m), float(np.sqrt(np.trace(sigma).real * inner))


def onenorm_twonorm_trial(sampler: SeededSampler, d: int = 4) -> Tuple[float, float]:
    psi = sampler.ginibre(d, 1).reshape(-1)
    psi /= np.linalg.norm(psi)
    phi = psi + sampler.rng.uniform() * sampler.ginibre(d, 1).reshape(-1)
    phi /= np.linalg.norm(phi)
    lhs = trace_norm(np.outer(psi, psi.conj()) - np.outer(phi, phi.conj()))
    return lhs, float(2 * np.linalg.norm(psi - phi))


def norm_prod_trial(sampler: SeededSampler, d: int = 4) -> Tuple[float, float]:
    n, m = _random_matrix(sampler, d), _random_matrix(sampler, d)
    return float(np.linalg.norm(n @ m)), float(np.linalg.norm(n) * np.linalg.norm(m, ord=2))


def tracenorm_maxu_trial(sampler: SeededSampler, d: int = 4) -> Tuple[float, float]:
    m = _random_matrix(sampler, d)
    rank = int(sampler.rng.integers(1, d + 1))
    left, right = haar_matrix(d, sampler)[:, :rank], haar_matrix(d, sampler)[:, :rank]
    v = left @ right.conj().T
    return float(abs(np.trace(v @ m))), trace_norm(m)


def fiou_trial(sampler: SeededSampler, d_a: int = 2, d_b: int = 3) -> Tuple[float, float]:
    g = sampler.ginibre(d_a * d_b, d_a * d_b)
    rho = g @ g.conj().T
    u = haar_matrix(d_b, sampler)
    p = (u * sampler.rng.uniform(size=d_b)) @ u.conj().T
    full_p = np.kron(np.eye(d_a), p)
    squeezed = np.einsum("ijkj->ik", (full_p @ rho @ full_p).reshape(d_a, d_b, d_a, d_b))
    rho_a = np.einsum("ijkj->ik", rho.reshape(d_a, d_b, d_a, d_b))
    return float(-np.linalg.eigvalsh(rho_a - squeezed)[0]), 0.0


def multidecoupling_trial(sampler: SeededSampler, dims: Tuple[int, int, int] = (2, 2, 2)) -> Tuple[float, float]:
    space = LabeledSpace.of(A=dims[0], B=dims[1], C=dims[2])
    product = np.kron(np.kron(random_density(space.sub("A"), sampler=sampler).matrix,
                              random_density(space.sub("B"), sampler=sampler).matrix),
                      random_density(space.sub("C"), sampler=sampler).matrix)
    rho = _perturbed(DensityOperator(space, product), sampler, 0.5)
    m = rho.matrix

    def near(keep):
        reduced = DensityOperator(space.sub(keep), ptrace_matrix(m, space, keep))
        return _perturbed(reduced, sampler, 0.5 * sampler.rng.uniform()).matrix

    # sigma, omega, tau and eta only approximate the marginals of rho; eps_1 and eps_2 are measured
    sigma, omega = near("A"), near(("B", "C"))
    tau, eta = near(("A", "B")), near("C")
    tau_b = ptrace_matrix(tau, space.sub(("A", "B")), "B")
    eps_1 = trace_norm(m - np.kron(sigma, omega))
    eps_2 = trace_norm(m - np.kron(tau, eta))
    return trace_norm(m - np.kron(np.kron(sigma, tau_b), eta)), 2 * eps_1 + eps_2


def fuchs_van_de_graaf_trial(sampler: SeededSampler, d: int = 3) -> Tuple[float, float]:
    space = LabeledSpace.of(A=d)
    rho = random_density(space, rank=int(sampler.rng.integers(1, d + 1)), sampler=sampler)
    sigma = random_density(space, sampler=sampler)
    f = fidelity(rho, sigma)
    half = trace_norm(rho.matrix - sigma.matrix) / 2
    return max(1 - f - half, half - np.sqrt(max(0.0, 1 - f ** 2))), 0.0


def fannes_trial(sampler: SeededSampler, d: int = 3) -> Tuple[float, float]:
    rho = random_density(LabeledSpace.of(A=d), sampler=sampler)
    sigma = _perturbed(rho, sampler, 1 / np.e)
    distance = min(trace_norm(rho.matrix - sigma.matrix), 1 / np.e)
    return abs(entropy(rho) - entropy(sigma)), fannes_bound(distance, d)


def alicki_fannes_trial(sampler: SeededSampler, d_a: int = 2, d_b: int = 2) -> Tuple[float, float]:
    rho = random_density(LabeledSpace.of(A=d_a, B=d_b), sampler=sampler)
    sigma = _perturbed(rho, sampler, 1.0)
    distance = min(trace_norm(rho.matrix - sigma.matrix), 1.0)
    gap = abs(conditional_entropy(rho, "A", "B") - conditional_entropy(sigma, "A", "B"))
    return gap, alicki_fannes_bound(distance, d_a)


APPENDIX_TRIALS: Dict[str, Callable[[SeededSampler], Tuple[float, float]]] = {
    "swap_trick": swap_trick_trial,
    "tr2_bounded": tr2_bounded_trial,
    "pseudo_jensen": pseudo_jensen_trial,
    "onenorm_twonorm": onenorm_twonorm_trial,
    "norm_prod": norm_prod_trial,
    "tracenorm_maxu": tracenorm_maxu_trial,
    "fiou": fiou_trial,
    "multidecoupling": multidecoupling_trial,
    "fuchs_van_de_graaf": fuchs_van_de_graaf_trial,
    "fannes": fannes_trial,
    "alicki_fannes": alicki_fannes_trial,
}


def appendix_checks(trials: int = 1000, sampler: Union[SeededSampler, int, None] = None,
                    lemmas: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """
    Run each appendix inequality on `trials` random instances.

    Returns:
    --------
    pd.DataFrame
        One row per inequality: trials, violations (lhs > rhs + tolerance)
        and the smallest slack rhs - lhs seen.
    """
    if trials < 1:
        raise ValueError("Number of trials must be at least 1.")
    names = list(APPENDIX_TRIALS) if lemmas is None else list(lemmas)
    unknown = [name for name in names if name not in APPENDIX_TRIALS]
    if unknown:
        raise ValueError(f"Unknown appendix inequalities {unknown}.")
    sampler = _as_sampler(sampler)
    rows = []
    for i, name in enumerate(names):
        parent = sampler.spawn(i)
        violations, slack = 0, np.inf
        for t in range(trials):
            lhs, bound = APPENDIX_TRIALS[name](parent.spawn(t))
            slack = min(slack, bound - lhs)
            if lhs > bound + APPENDIX_TOL * max(1.0, abs(bound)):
                violations += 1
        if violations:
            logger.warning("Inequality %s violated in %d of %d trials", name, violations, trials)
        rows.append({"lemma": name, "trials": trials, "violations": violations, "min_slack": float(slack)})
    return pd.DataFrame(rows)


if __name__ == "__main__":
    try:
        test_cases = [
            ("fqsw", {"dim_a": 4, "dim_e": 2}),
            ("merge", {"dim_a": 4, "dim_e": 2}),
            ("subspace", {"dim_a": 4, "dim_e": 4}),
            ("projective_merge", {"dim_a": 4, "dim_e": 2, "dim_e2": 2}),
        ]
        print("\nRunning test cases...")
        for kind, params in test_cases:
            experiment = corollary_run(kind, dim_r=2, n_samples=100, sampler=SeededSampler(7), **params)
            print(f"\nResults for {kind} with {params}")
            print(f"Mean LHS: {experiment.mean:.6f} +- {experiment.stderr:.6f}")
            print(f"Generic rhs: {experiment.rhs:.6f}, closed form: {experiment.closed_form_rhs:.6f}")
            print(f"Within bound: {experiment.within_bound()}")
            print("--------------------------------")
        pair = DensityOperator(LabeledSpace.of(A=2, B=2),
                               np.outer(np.eye(2).reshape(-1), np.eye(2).reshape(-1)) / 2)
        _, residual, bound = randomize_destroy(pair, k=2, eps=0.0, dim=2, sampler=SeededSampler(3))
        print(f"Weyl randomization of a Bell pair: residual {residual:.10f}, bound {bound:.6f}")
        print(appendix_checks(trials=20, sampler=SeededSampler(11)).to_string(index=False))
    except ValueError as e:
        print(f"Error: {str(e)}")
    except Exception as e:
        print(f"An unexpected error occurred: {str(e)}")
