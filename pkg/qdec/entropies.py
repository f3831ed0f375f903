import logging
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

import cvxpy as cp
import numpy as np
from scipy.optimize import minimize

from .tensor_core import (DERIVED_TOL, RANK_CUTOFF, DensityOperator, LabeledSpace, Labels, PureState, State,
                          as_labels, fidelity_distance, psd_power, ptrace_matrix, ptrace_vector, purify)

logger = logging.getLogger(__name__)

KINDS = ("min", "2", "max")
SOLVERS = ("CLARABEL", "SCS")


@dataclass(frozen=True)
class EntropyReport:
    """
    Value of an entropic quantity in bits with how it was obtained.

    method is 'closed-form', 'optimizer' or 'oracle'. Optimizer results carry
    their convergence diagnostics; smoothed results carry the ball member
    that achieves them.
    """
    value: float
    method: str
    kind: str = ""
    iterations: int = 0
    grad_norm: Optional[float] = None
    gap: Optional[float] = None
    converged: bool = True
    eps: float = 0.0
    strategy: Optional[str] = None
    member: Optional[DensityOperator] = field(default=None, repr=False, compare=False)

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("member")
        return data


def _split(rho: State, of: Labels, given: Labels) -> Tuple[np.ndarray, int, int]:
    """Marginal on of+given as a raw matrix ordered (of, given), with |of| and |given|."""
    given = as_labels(given)
    of = as_labels(of) or tuple(label for label in rho.labels if label not in given)
    if set(of) & set(given):
        raise ValueError("Conditioned and conditioning systems must be disjoint.")
    if isinstance(rho, PureState):
        mat = ptrace_vector(rho.amplitudes, rho.space, of + given)
    else:
        mat = ptrace_matrix(rho.matrix, rho.space, of + given)
    return mat, rho.space.dim_of(of), rho.space.dim_of(given)


def _log2(x: float) -> float:
    return float(np.log2(x)) if x > 0 else float("inf")


def _shannon(vals: np.ndarray) -> float:
    vals = vals[vals > RANK_CUTOFF]
    return float(-(vals * np.log2(vals)).sum())


# ---------------------------------------------------------------------------
# von Neumann family
# ---------------------------------------------------------------------------

def entropy(rho: State, of: Labels = None) -> float:
    """H(A) = -tr[rho^A log rho^A], with 0 log 0 = 0."""
    mat, _, _ = _split(rho, of, ())
    return _shannon(np.linalg.eigvalsh(mat))


def conditional_entropy(rho: State, of: Labels, given: Labels) -> float:
    of, given = as_labels(of), as_labels(given)
    return entropy(rho, of + given) - entropy(rho, given) if given else entropy(rho, of)


def mutual_information(rho: State, a: Labels, b: Labels, given: Labels = ()) -> float:
    """I(A;B|C) = H(AC) + H(BC) - H(ABC) - H(C)."""
    a, b, c = as_labels(a), as_labels(b), as_labels(given)
    h_c = entropy(rho, c) if c else 0.0
    return entropy(rho, a + c) + entropy(rho, b + c) - entropy(rho, a + b + c) - h_c


def coherent_information(rho: State, a: Labels, b: Labels) -> float:
    """I(A>B) = -H(A|B)."""
    return -conditional_entropy(rho, a, b)


def von_neumann(rho: State, kind: str, a: Labels, b: Labels = (), c: Labels = ()) -> EntropyReport:
    """
    Evaluate a von Neumann quantity by label arguments.

    Parameters:
    -----------
    rho : DensityOperator or PureState
    kind : str
        'H' for H(A), 'H|' for H(A|B), 'I' for I(A;B), 'I|' for I(A;B|C),
        'Ic' for I(A>B).
    a, b, c : labels

    Returns:
    --------
    EntropyReport
        Closed-form value in bits.
    """
    if kind == "H":
        value = entropy(rho, a)
    elif kind == "H|":
        value = conditional_entropy(rho, a, b)
    elif kind == "I":
        value = mutual_information(rho, a, b)
    elif kind == "I|":
        value = mutual_information(rho, a, b, c)
    elif kind == "Ic":
        value = coherent_information(rho, a, b)
    else:
        raise ValueError("Kind must be one of 'H', 'H|', 'I', 'I|' or 'Ic'.")
    return EntropyReport(value, "closed-form", kind)


def eta(x: float) -> float:
    """-x log x, extended by eta(0) = 0."""
    return float(-x * np.log2(x)) if x > 0 else 0.0


def fannes_bound(distance: float, dim: int) -> float:
    """Continuity bound |H(rho) - H(sigma)| <= T log d + eta(T), valid for T = ||rho - sigma||_1 <= 1/e."""
    if not 0 <= distance <= 1 / np.e:
        raise ValueError("Fannes' inequality needs a trace distance between 0 and 1/e.")
    return distance * float(np.log2(dim)) + eta(distance)


def alicki_fannes_bound(distance: float, dim_a: int) -> float:
    """Continuity bound on H(A|B): 4 eps log|A| + 2 eta(1 - eps) + 2 eta(eps), for eps <= 1."""
    if not 0 <= distance <= 1:
        raise ValueError("Alicki-Fannes inequality needs a trace distance between 0 and 1.")
    return 4 * distance * float(np.log2(dim_a)) + 2 * eta(1 - distance) + 2 * eta(distance)


# ---------------------------------------------------------------------------
# min-entropy
# ---------------------------------------------------------------------------

def _solve(problem: cp.Problem, solver: Optional[str]) -> str:
    for name in ((solver,) if solver else SOLVERS):
        try:
            problem.solve(solver=name)
            if problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
                return name
            logger.warning("%s finished with status %s", name, problem.status)
        except cp.error.SolverError as e:
            logger.warning("%s failed: %s", name, e)
    return ""


def hmin_matrix(mat: np.ndarray, d_a: int, d_b: int, solver: Optional[str] = None) -> EntropyReport:
    """
    H_min(A|B) of a raw PSD matrix ordered (A, B).

    The semidefinite program min tr[sigma] s.t. I x sigma >= rho is solved with
    cvxpy. The primal solution is shifted by t I until it is exactly feasible,
    so the reported value is a certified lower bound. A projected dual point
    yields the certified gap.
    """
    mat = (mat + mat.conj().T) / 2
    if d_b == 1:
        lam = float(np.linalg.eigvalsh(mat)[-1])
        return EntropyReport(-_log2(lam), "closed-form", "min")
    lam_max = float(np.linalg.eigvalsh(mat)[-1])
    rho_b = np.einsum("ijik->jk", mat.reshape(d_a, d_b, d_a, d_b))
    # two always-feasible points: lam_max I and d_A rho_B
    fallback = min(lam_max * d_b, d_a * float(np.trace(rho_b).real))

    sigma = cp.Variable((d_b, d_b), hermitian=True)
    constraint = cp.kron(np.eye(d_a), sigma) - mat >> 0
    problem = cp.Problem(cp.Minimize(cp.real(cp.trace(sigma))), [constraint])
    used = _solve(problem, solver)
    if not used or sigma.value is None:
        logger.warning("Min-entropy SDP did not converge; reporting the feasible fallback point")
        return EntropyReport(-_log2(fallback), "optimizer", "min", converged=False)

    primal = (sigma.value + sigma.value.conj().T) / 2
    slack = np.linalg.eigvalsh(np.kron(np.eye(d_a), primal) - mat)[0]
    shift = max(0.0, -float(slack))
    primal_value = float(np.trace(primal).real) + shift * d_b
    primal_value = min(primal_value, fallback)

    gap = None
    dual = constraint.dual_value
    if dual is not None and np.shape(dual) == mat.shape:
        y = psd_power(np.asarray(dual, dtype=complex), 1.0, floor=0.0)
        y_b = np.einsum("ijik->jk", y.reshape(d_a, d_b, d_a, d_b))
        if np.linalg.eigvalsh(y_b)[0] > RANK_CUTOFF:
            scale = np.kron(np.eye(d_a), psd_power(y_b, -0.5))
            dual_value = float(np.trace(scale @ y @ scale @ mat).real)
            if dual_value > 0:
                gap = _log2(primal_value) - _log2(dual_value)
    return EntropyReport(-_log2(primal_value), "optimizer", "min", iterations=int(problem.solver_stats.num_iters or 0),
                         gap=gap, converged=True)


def h_min(rho: State, given: Labels = (), of: Labels = None, solver: Optional[str] = None) -> EntropyReport:
    """
    Conditional min-entropy H_min(A|B) in bits.

    Parameters:
    -----------
    rho : DensityOperator or PureState
        Possibly subnormalized state.
    given : labels
        Conditioning systems B (empty for the unconditional min-entropy).
    of : labels, optional
        Systems A; defaults to every system not in `given`.
    solver : str, optional
        cvxpy solver name; defaults to Clarabel with SCS as fallback.

    Returns:
    --------
    EntropyReport
        -log of the largest eigenvalue when unconditional, otherwise the
        certified SDP value.
    """
    mat, d_a, d_b = _split(rho, of, given)
    return hmin_matrix(mat, d_a, d_b, solver)


# ---------------------------------------------------------------------------
# collision entropy
# ---------------------------------------------------------------------------

def _divided_difference(vals: np.ndarray) -> np.ndarray:
    f = vals ** -0.5
    diff = vals[:, None] - vals[None, :]
    num = f[:, None] - f[None, :]
    close = np.abs(diff) < 1e-12 * max(1.0, vals.max())
    safe = np.where(close, 1.0, diff)
    return np.where(close, -0.5 * (vals[:, None] ** -1.5 + vals[None, :] ** -1.5) / 2, num / safe)


def _collision_objective(mat: np.ndarray, d_a: int, d_b: int):
    eye_a = np.eye(d_a)

    def objective(x: np.ndarray):
        g = (x[:d_b * d_b] + 1j * x[d_b * d_b:]).reshape(d_b, d_b)
        norm = float(np.trace(g.conj().T @ g).real)
        sigma = g.conj().T @ g / norm
        vals, vecs = np.linalg.eigh(sigma)
        vals = np.clip(vals, RANK_CUTOFF, None)
        inv_sqrt = (vecs * vals ** -0.5) @ vecs.conj().T
        s = np.kron(eye_a, inv_sqrt)
        srho = s @ mat
        value = float(np.trace(srho @ srho).real)
        # gradient with respect to sigma^{-1/2}, then sigma, then g
        grad_x = 2 * np.einsum("ijik->jk", (mat @ s @ mat).reshape(d_a, d_b, d_a, d_b))
        rotated = vecs.conj().T @ grad_x @ vecs
        grad_sigma = vecs @ (_divided_difference(vals) * rotated) @ vecs.conj().T
        grad_sigma = (grad_sigma + grad_sigma.conj().T) / 2
        c = float(np.trace(grad_sigma @ sigma).real)
        z = (g @ grad_sigma - c * g) / norm
        return value, 2 * np.concatenate([z.real.reshape(-1), z.imag.reshape(-1)])

    return objective


def h2_matrix(mat: np.ndarray, d_a: int, d_b: int, maxiter: int = 500) -> EntropyReport:
    """
    H_2(A|B) of a raw PSD matrix ordered (A, B).

    Minimizes tr[(I x sigma^{-1/2}) rho (I x sigma^{-1/2}) rho] over normalized
    sigma = G^dagger G / tr[G^dagger G] restricted to the support of rho_B,
    starting from rho_B itself. Every evaluated sigma gives a valid lower
    bound on H_2, so the best point seen is reported.
    """
    mat = (mat + mat.conj().T) / 2
    if d_b == 1:
        return EntropyReport(-_log2(float(np.trace(mat @ mat).real)), "closed-form", "2")
    rho_b = np.einsum("ijik->jk", mat.reshape(d_a, d_b, d_a, d_b))
    vals, vecs = np.linalg.eigh(rho_b)
    support = vecs[:, vals > RANK_CUTOFF * max(1.0, vals.max())]
    r = support.shape[1]
    if r == 0:
        return EntropyReport(float("inf"), "closed-form", "2")
    proj = np.kron(np.eye(d_a), support)
    restricted = proj.conj().T @ mat @ proj
    start = psd_power(support.conj().T @ rho_b @ support, 0.5)
    x0 = np.concatenate([start.real.reshape(-1), start.imag.reshape(-1)])
    objective = _collision_objective(restricted, d_a, r)
    f0, _ = objective(x0)
    if r == 1:
        return EntropyReport(-_log2(f0), "closed-form", "2")
    result = minimize(objective, x0, jac=True, method="BFGS", options={"maxiter": maxiter, "gtol": 1e-10})
    best = min(f0, float(result.fun))
    if not result.success:
        logger.debug("Collision-entropy optimizer stopped: %s", result.message)
    return EntropyReport(-_log2(best), "optimizer", "2", iterations=int(result.nit),
                         grad_norm=float(np.linalg.norm(result.jac)), converged=bool(result.success))


def h_2(rho: State, given: Labels = (), of: Labels = None) -> EntropyReport:
    """
    Conditional collision entropy H_2(A|B) in bits.

    Parameters:
    -----------
    rho : DensityOperator or PureState
    given : labels
        Conditioning systems B.
    of : labels, optional
        Systems A; defaults to every system not in `given`.

    Returns:
    --------
    EntropyReport
        -log tr[rho^2] when unconditional, otherwise the optimizer value
        (a certified lower bound).
    """
    mat, d_a, d_b = _split(rho, of, given)
    return h2_matrix(mat, d_a, d_b)


# ---------------------------------------------------------------------------
# max-entropy
# ---------------------------------------------------------------------------

def h_max(rho: State, given: Labels = (), of: Labels = None, solver: Optional[str] = None) -> EntropyReport:
    """
    H_max(A|B) = -H_min(A|C) for any purification |psi>^{ABC}.

    Unconditional case: 2 log tr sqrt(rho^A).
    """
    given = as_labels(given)
    of = as_labels(of) or tuple(label for label in rho.labels if label not in given)
    mat, d_a, d_b = _split(rho, of, given)
    if d_b == 1:
        vals = np.clip(np.linalg.eigvalsh(mat), 0.0, None)
        return EntropyReport(2 * _log2(float(np.sqrt(vals).sum())), "closed-form", "max")
    marg = DensityOperator(rho.space.sub(of + given), mat, normalized=False)
    psi = purify(marg, "~purifier")
    dual = h_min(psi, given="~purifier", of=of, solver=solver)
    return EntropyReport(-dual.value, dual.method, "max", iterations=dual.iterations, gap=dual.gap,
                         converged=dual.converged)


def entropy_matrix(kind: str, mat: np.ndarray, d_a: int, d_b: int) -> EntropyReport:
    if kind == "min":
        return hmin_matrix(mat, d_a, d_b)
    if kind == "2":
        return h2_matrix(mat, d_a, d_b)
    if kind == "max":
        if d_b == 1:
            vals = np.clip(np.linalg.eigvalsh((mat + mat.conj().T) / 2), 0.0, None)
            return EntropyReport(2 * _log2(float(np.sqrt(vals).sum())), "closed-form", "max")
        space = LabeledSpace((("~a", d_a), ("~b", d_b)))
        return h_max(DensityOperator(space, mat, normalized=False), given="~b")
    raise ValueError(f"Entropy kind must be one of {KINDS}.")


# ---------------------------------------------------------------------------
# smoothing
# ---------------------------------------------------------------------------

def _bisect(predicate, lo: float, hi: float, steps: int = 60) -> float:
    """Largest x in [lo, hi] with predicate(x) true, assuming predicate(lo) and monotonicity."""
    if predicate(hi):
        return hi
    for _ in range(steps):
        mid = (lo + hi) / 2
        if predicate(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _spectral_candidates(kind: str, mat: np.ndarray, eps: float):
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    tr = vals.sum()

    def rebuild(new_vals):
        return (vecs * new_vals) @ vecs.conj().T

    def commuting_fidelity(new_vals):
        overlap = np.sqrt(vals * new_vals).sum()
        return overlap + np.sqrt(max(0.0, 1 - tr) * max(0.0, 1 - new_vals.sum()))

    def within(new_vals):
        return np.sqrt(max(0.0, 1 - commuting_fidelity(new_vals) ** 2)) <= eps

    candidates = []
    if kind in ("min", "2"):
        # cap the largest eigenvalues at level c
        top = vals.max()
        gap = _bisect(lambda g: within(np.minimum(vals, top - g)), 0.0, top)
        candidates.append(("truncate", rebuild(np.minimum(vals, top - gap))))
    else:
        # drop the smallest eigenvalues while the removed mass keeps d_F <= eps
        order = np.argsort(vals)
        new_vals = vals.copy()
        for idx in order:
            trial = new_vals.copy()
            trial[idx] = 0.0
            if not within(trial) or trial.sum() <= 0:
                break
            new_vals = trial
        candidates.append(("truncate", rebuild(new_vals)))
    return candidates


def smooth(kind: str, rho: State, eps: float, given: Labels = (), of: Labels = None,
           strategy: str = "best") -> EntropyReport:
    """
    One-sided bound on a smooth entropy with an explicit member of the eps-ball.

    Parameters:
    -----------
    kind : str
        'min', '2' or 'max'.
    rho : DensityOperator or PureState
    eps : float
        Fidelity-distance radius in [0, 1].
    given, of : labels
        Conditioning and conditioned systems.
    strategy : str
        'truncate' (spectral truncation), 'flatten' (mixing towards
        pi^A x rho^B for min/2, uniform scaling for max) or 'best'.

    Returns:
    --------
    EntropyReport
        Lower bound on H_min^eps or H_2^eps, upper bound on H_max^eps. The
        member field holds the ball element achieving it.
    """
    if kind not in KINDS:
        raise ValueError(f"Entropy kind must be one of {KINDS}.")
    if not 0 <= eps <= 1:
        raise ValueError("Smoothing parameter eps must be between 0 and 1.")
    if strategy not in ("truncate", "flatten", "best"):
        raise ValueError("Strategy must be 'truncate', 'flatten' or 'best'.")
    given = as_labels(given)
    of = as_labels(of) or tuple(label for label in rho.labels if label not in given)
    mat, d_a, d_b = _split(rho, of, given)
    space = rho.space.sub(of + given)
    center = DensityOperator(space, mat, normalized=False)

    candidates = [("none", mat)]
    if eps > 0:
        if strategy in ("truncate", "best"):
            candidates += _spectral_candidates(kind, mat, eps)
        if strategy in ("flatten", "best"):
            candidates += _flatten_candidates(kind, mat, d_a, d_b, eps, center)

    better = (lambda x, y: x > y) if kind in ("min", "2") else (lambda x, y: x < y)
    best: Optional[EntropyReport] = None
    best_member = None
    best_name = None
    for name, cand in candidates:
        member = center if name == "none" else DensityOperator(space, cand, normalized=False)
        # the center is always in the ball; fidelity_distance(rho, rho) carries sqrtm noise on singular rho
        if name != "none" and (member.trace > 1 + DERIVED_TOL
                               or fidelity_distance(center, member) > eps + DERIVED_TOL):
            logger.debug("Discarding smoothing candidate %s outside the ball", name)
            continue
        report = entropy_matrix(kind, cand, d_a, d_b)
        if best is None or better(report.value, best.value):
            best, best_member, best_name = report, member, name
    if best is None:
        raise ValueError(f"No member of the {eps}-ball survived for H_{kind}.")
    return EntropyReport(best.value, best.method, kind, iterations=best.iterations, grad_norm=best.grad_norm,
                         gap=best.gap, converged=best.converged, eps=eps, strategy=best_name, member=best_member)


def _flatten_candidates(kind: str, mat: np.ndarray, d_a: int, d_b: int, eps: float, center: DensityOperator):
    if kind == "max":
        # uniform scaling s rho has F = sqrt(s)
        return [("flatten", (1 - eps ** 2) * mat)]
    rho_b = np.einsum("ijik->jk", mat.reshape(d_a, d_b, d_a, d_b))
    target = np.kron(np.eye(d_a) / d_a, rho_b)

    def within(t):
        mixed = DensityOperator(center.space, (1 - t) * mat + t * target, normalized=False)
        return fidelity_distance(center, mixed) <= eps

    t_max = _bisect(within, 0.0, 1.0, steps=40)
    return [("flatten", (1 - t) * mat + t * target) for t in (t_max / 4, t_max / 2, 3 * t_max / 4, t_max) if t > 0]


# ---------------------------------------------------------------------------
# asymptotic equipartition
# ---------------------------------------------------------------------------

def aep_threshold(eps: float) -> float:
    return 8 / 5 * np.log2(2 / eps ** 2)


def aep_bound(h_ab: float, dim_a: int, n: int, eps: float, eta: Optional[float] = None) -> float:
    """
    Per-copy lower bound on the smooth min-entropy of n i.i.d. copies.

    Parameters:
    -----------
    h_ab : float
        Conditional von Neumann entropy H(A|B) of one copy.
    dim_a : int
        Dimension |A|, used for the default eta = 2 sqrt(|A|) + 1.
    n : int
        Number of copies; must satisfy n >= (8/5) log(2/eps^2).
    eps : float
        Smoothing parameter in (0, 1).
    eta : float, optional
        Override of the state-dependent constant.

    Returns:
    --------
    float
        H(A|B) - 4 log(eta) sqrt(log(2/eps^2) / n)
    """
    if not 0 < eps < 1:
        raise ValueError("Smoothing parameter eps must be between 0 and 1.")
    if dim_a < 1:
        raise ValueError("Dimension |A| must be positive.")
    if n < aep_threshold(eps):
        raise ValueError(f"Number of copies n must be at least (8/5) log(2/eps^2) = {aep_threshold(eps):.4f}.")
    eta = 2 * np.sqrt(dim_a) + 1 if eta is None else float(eta)
    return float(h_ab - 4 * np.log2(eta) * np.sqrt(np.log2(2 / eps ** 2) / n))


def eta_from_state(rho: State, given: Labels = (), of: Labels = None) -> float:
    """sqrt(2^{-H_min(A|B)}) + sqrt(2^{H_max(A|B)}) + 1; never above 2 sqrt(|A|) + 1."""
    lo = h_min(rho, given, of).value
    hi = h_max(rho, given, of).value
    return float(np.sqrt(2.0 ** -lo) + np.sqrt(2.0 ** hi) + 1)


# ---------------------------------------------------------------------------
# brute-force oracles for a qubit conditioning system
# ---------------------------------------------------------------------------

_PAULIS = (np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]]))


def _bloch(r: np.ndarray) -> np.ndarray:
    return (np.eye(2) + sum(c * p for c, p in zip(r, _PAULIS))) / 2


def bloch_oracle(kind: str, rho: State, given: Labels, of: Labels = None, points: int = 11,
                 zooms: int = 8) -> EntropyReport:
    """
    Zooming grid search over Bloch-parametrized sigma^B for |B| = 2.

    kind 'min' minimizes the smallest feasible tr[sigma] along each grid
    direction, kind '2' the collision objective.
    """
    mat, d_a, d_b = _split(rho, of, given)
    if d_b != 2:
        raise ValueError("The Bloch oracle needs a qubit conditioning system.")
    if kind not in ("min", "2"):
        raise ValueError("Bloch oracle kinds are 'min' and '2'.")
    eye_a = np.eye(d_a)

    def score(r):
        s = np.kron(eye_a, psd_power(_bloch(r), -0.5))
        if kind == "min":
            return float(np.linalg.eigvalsh(s @ mat @ s)[-1])
        srho = s @ mat
        return float(np.trace(srho @ srho).real)

    center, width = np.zeros(3), 1.0
    best_r, best = center, score(center)
    for _ in range(zooms):
        axis = np.linspace(-width, width, points)
        for x in axis:
            for y in axis:
                for z in axis:
                    r = center + np.array([x, y, z])
                    if np.linalg.norm(r) >= 1 - 1e-9:
                        continue
                    value = score(r)
                    if value < best:
                        best, best_r = value, r
        center, width = best_r, width * 4 / (points - 1)
    return EntropyReport(-_log2(best), "oracle", kind)


if __name__ == "__main__":
    try:
        from .tensor_core import maximally_entangled, maximally_mixed

        phi = maximally_entangled("A", "B", 2)
        print("\nRunning test cases...")
        print(f"H(A|B) of Phi: {conditional_entropy(phi, 'A', 'B'):.10f}")
        print(f"H_min(A|B) of Phi: {h_min(phi, 'B').value:.10f}")
        print(f"H_2(A|B) of Phi: {h_2(phi, 'B').value:.10f}")
        print(f"H_max(A|B) of Phi: {h_max(phi, 'B').value:.10f}")
        pi = maximally_mixed(LabeledSpace.of(A=4))
        print(f"H_min, H_2, H_max of pi_4: {h_min(pi).value:.6f}, {h_2(pi).value:.6f}, {h_max(pi).value:.6f}")
        near_pure = DensityOperator(LabeledSpace.of(A=2), np.diag([0.99, 0.01]))
        for eps in [0.0, 0.05, 0.1]:
            print(f"eps={eps}: smooth H_2 >= {smooth('2', near_pure, eps).value:.6f}")
        print(f"AEP bound (qubit, eps=0.1, n=1e4, H=1): {aep_bound(1.0, 2, 10 ** 4, 0.1):.10f}")
        print("--------------------------------")
    except ValueError as e:
        print(f"Error: {str(e)}")
    except Exception as e:
        print(f"An unexpected error occurred: {str(e)}")
