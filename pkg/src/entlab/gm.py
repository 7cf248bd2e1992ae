"""Multistart see-saw optimization over product and biseparable states.

Every routine alternates over one tensor factor at a time, replacing it by the
optimal vector for the others held fixed, so the objective never gets worse
within a restart. See-saw values are certified lower bounds for maxima (upper
bounds for minima); global optimality is assumed from the restart count.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from string import ascii_lowercase

import numpy as np
import scipy.linalg
import scipy.optimize

from entlab.config import SeesawConfig, derive_seed
from entlab.errors import DimensionError, InvalidStateError, UnsupportedCombinationError
from entlab.linalg import (
    ComplexArray,
    Operator,
    StateVector,
    bipartitions,
    random_unit_vector,
    schmidt_coefficients,
)
from entlab.subspaces import build_permutations, default_z, flip_conjugate_vector
from entlab.witnesses import conditional_observable

# Relative slack allowed before a half-step counts as a decrease
MONOTONE_SLACK = 1e-10
# Eigenvalues closer than this are treated as one degenerate cluster
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ProductState:
    """Unit vectors, one per party."""

    factors: list[ComplexArray]

    def __post_init__(self) -> None:
        for k, f in enumerate(self.factors):
            norm = float(np.linalg.norm(f))
            if abs(norm - 1.0) > 1e-12:
                raise InvalidStateError(f"product factor {k} has norm {norm:.15g}")

    @property
    def parties(self) -> int:
        return len(self.factors)

    def vector(self) -> ComplexArray:
        result = self.factors[0]
        for f in self.factors[1:]:
            result = np.kron(result, f)
        return result


@dataclass(frozen=True, eq=False)
class BiseparableState:
    """|η⟩_X ⊗ |μ⟩_YZ for the cut X | rest."""

    party: int
    eta: ComplexArray
    mu: ComplexArray

    def vector(self) -> ComplexArray:
        """Amplitudes in the standard party order A, B, C."""
        d = self.eta.shape[0]
        tensor = np.kron(self.eta, self.mu).reshape(d, d, d)
        order = [0, 1, 2]
        order.remove(self.party - 1)
        # axis 0 holds party X, axes 1..2 the remaining parties in order
        inverse = np.argsort([self.party - 1, *order])
        return tensor.transpose(inverse).reshape(-1)


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    """Best value over all restarts with its optimizer and run statistics.

    Attributes:
        value: Best objective value found.
        argument: Optimizing product or biseparable state.
        restarts_used: Number of restarts performed.
        converged: Whether the best restart met the tolerance.
        iterations: Sweeps used by the best restart.
        nonconverged_restarts: Restarts that hit max_iter.
        history: Objective after every half-step of the best restart.
    """

    value: float
    argument: ProductState | BiseparableState
    restarts_used: int
    converged: bool
    iterations: int
    nonconverged_restarts: int = 0
    history: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class ChiNormResult:
    """Maximum of ⟨χ|χ⟩ with the weights |b_n|², |c_n|² at the optimum."""

    value: float
    b_weight: float
    c_weight: float


@dataclass(frozen=True)
class FlipConjugateBound:
    """Analytic lower bound on G over H_I and the optional measured value."""

    bound: float
    measured: float | None

    @property
    def holds(self) -> bool:
        return self.measured is None or self.measured >= self.bound - 1e-9


@dataclass
class _Restart:
    value: float
    factors: list[ComplexArray]
    iterations: int
    converged: bool
    history: list[float]


def _restart_rng(cfg: SeesawConfig, label: str, index: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(cfg.seed, label, index))


def _improves(new: float, old: float, maximize: bool) -> bool:
    return new > old if maximize else new < old


def _check_monotone(history: list[float], maximize: bool) -> None:
    if len(history) < 2:
        return
    prev, new = history[-2], history[-1]
    slack = MONOTONE_SLACK * max(1.0, abs(prev))
    if (maximize and new < prev - slack) or (not maximize and new > prev + slack):
        raise InvalidStateError(f"see-saw objective moved the wrong way: {prev!r} -> {new!r}")


def _select_eigenvector(
    matrix: ComplexArray, previous: ComplexArray, maximize: bool
) -> tuple[float, ComplexArray]:
    """Extremal eigenpair; inside a degenerate cluster keep the previous iterate's projection."""
    values, vectors = scipy.linalg.eigh(matrix)
    target = values[-1] if maximize else values[0]
    cluster = vectors[:, np.abs(values - target) <= DEGENERACY_TOL * max(1.0, abs(target))]
    if cluster.shape[1] > 1:
        projected = cluster @ (cluster.conj().T @ previous)
        norm = float(np.linalg.norm(projected))
        if norm > 1e-8:
            return float(target), projected / norm
    index = -1 if maximize else 0
    return float(target), vectors[:, index]


def _conditional_subscripts(n: int, k: int) -> str:
    """einsum spec contracting an operator tensor with all factors except k."""
    ket = ascii_lowercase[:n]
    bra = ascii_lowercase[n : 2 * n]
    inputs = [ket + bra]
    for j in range(n):
        if j != k:
            inputs += [ket[j], bra[j]]
    return ",".join(inputs) + "->" + ket[k] + bra[k]


def _run_restarts(
    cfg: SeesawConfig,
    label: str,
    maximize: bool,
    sweep: Callable[[list[ComplexArray], list[float]], float],
    start: Callable[[np.random.Generator], list[ComplexArray]],
    initial: Sequence[ComplexArray] | None,
) -> tuple[_Restart, int]:
    best: _Restart | None = None
    nonconverged = 0
    for r in range(cfg.restarts):
        if r == 0 and initial is not None:
            factors = [np.asarray(f, dtype=np.complex128).copy() for f in initial]
        else:
            factors = start(_restart_rng(cfg, label, r))
        history: list[float] = []
        value = sweep(factors, history)
        converged = False
        iterations = 1
        while iterations < cfg.max_iter:
            new_value = sweep(factors, history)
            iterations += 1
            if abs(new_value - value) <= cfg.rel_tol * max(1.0, abs(value)):
                value = new_value
                converged = True
                break
            value = new_value
        if not converged:
            nonconverged += 1
        outcome = _Restart(value, factors, iterations, converged, history)
        if best is None or _improves(outcome.value, best.value, maximize):
            best = outcome
    assert best is not None
    return best, nonconverged


def product_extremum(
    op: Operator,
    cfg: SeesawConfig,
    maximize: bool = True,
    initial: Sequence[ComplexArray] | None = None,
) -> OptimizationResult:
    """Extremize ⟨a_1...a_n|op|a_1...a_n⟩ over product states.

    Each half-step replaces factor k by the top (or bottom) eigenvector of the
    conditional operator obtained by fixing every other factor.

    Args:
        op: Hermitian operator on n parties.
        cfg: See-saw settings.
        maximize: Maximize when True, minimize otherwise.
        initial: Optional warm-start factors used for the first restart.

    Returns:
        OptimizationResult carrying a ProductState.
    """
    n, d = op.parties, op.local_dim
    tensor = op.entries.reshape((d,) * (2 * n))
    specs = [_conditional_subscripts(n, k) for k in range(n)]

    def sweep(factors: list[ComplexArray], history: list[float]) -> float:
        value = 0.0
        for k in range(n):
            operands: list[ComplexArray] = []
            for j in range(n):
                if j != k:
                    operands += [factors[j].conj(), factors[j]]
            conditional = np.einsum(specs[k], tensor, *operands)
            value, factors[k] = _select_eigenvector(conditional, factors[k], maximize)
            history.append(value)
            _check_monotone(history, maximize)
        return value

    def start(rng: np.random.Generator) -> list[ComplexArray]:
        return [random_unit_vector(d, rng) for _ in range(n)]

    best, nonconverged = _run_restarts(cfg, "product", maximize, sweep, start, initial)
    return OptimizationResult(
        value=best.value,
        argument=ProductState(best.factors),
        restarts_used=cfg.restarts,
        converged=best.converged,
        iterations=best.iterations,
        nonconverged_restarts=nonconverged,
        history=best.history,
    )


def max_product_overlap(psi: StateVector, cfg: SeesawConfig) -> OptimizationResult:
    """Λ²(ψ): the largest |⟨a_1...a_n|ψ⟩|² over product states.

    Factor k is replaced by the normalized contraction of ψ with the conjugates
    of the other factors.

    Raises:
        UnsupportedCombinationError: If n is not 2, 3 or 4.
    """
    n, d = psi.parties, psi.local_dim
    if n not in (2, 3, 4):
        raise UnsupportedCombinationError("party count", n, (2, 3, 4))
    tensor = psi.tensor()
    letters = ascii_lowercase[:n]
    specs = [
        letters + "," + ",".join(letters[j] for j in range(n) if j != k) + "->" + letters[k]
        for k in range(n)
    ]

    def sweep(factors: list[ComplexArray], history: list[float]) -> float:
        value = 0.0
        for k in range(n):
            others = [factors[j].conj() for j in range(n) if j != k]
            contracted = np.einsum(specs[k], tensor, *others)
            norm = float(np.linalg.norm(contracted))
            if norm > 0.0:
                factors[k] = contracted / norm
            value = norm**2
            history.append(value)
            _check_monotone(history, True)
        return value

    def start(rng: np.random.Generator) -> list[ComplexArray]:
        return [random_unit_vector(d, rng) for _ in range(n)]

    best, nonconverged = _run_restarts(cfg, "overlap", True, sweep, start, None)
    return OptimizationResult(
        value=best.value,
        argument=ProductState(best.factors),
        restarts_used=cfg.restarts,
        converged=best.converged,
        iterations=best.iterations,
        nonconverged_restarts=nonconverged,
        history=best.history,
    )


def geometric_measure(psi: StateVector, cfg: SeesawConfig) -> float:
    """G(ψ) = 1 - Λ²(ψ)."""
    return 1.0 - max_product_overlap(psi, cfg).value


def gme_schmidt_measure(psi: StateVector) -> float:
    """1 - max over bipartitions of the largest squared Schmidt coefficient.

    This is the geometric measure with respect to biseparable pure states.
    """
    best = max(float(schmidt_coefficients(psi, side)[0]) ** 2 for side in bipartitions(psi.parties))
    return 1.0 - best


def min_projector_overlap(pi: Operator, cfg: SeesawConfig) -> OptimizationResult:
    """Minimum of ⟨a_1...a_n|Π|a_1...a_n⟩ over product states.

    Raises:
        InvalidStateError: If Π is not a Hermitian idempotent.
    """
    square_dev = float(np.max(np.abs(pi.entries @ pi.entries - pi.entries)))
    if pi.hermitian_deviation() > 1e-10 or square_dev > 1e-9:
        raise InvalidStateError("min_projector_overlap needs a Hermitian projector")
    return product_extremum(pi, cfg, maximize=False)


def eta_eigenvalues(theta: float, alpha: float) -> tuple[float, float]:
    """Both closed-form eigenvalue branches λ±(θ) at phase α.

    λ±(θ) = ½cosθ(C cosθ/2 ± √((C cosθ/2)² + sin²θ)), C = 2cos α.
    """
    c = 2.0 * np.cos(alpha)
    half = c * np.cos(theta) / 2.0
    root = np.sqrt(half**2 + np.sin(theta) ** 2)
    return 0.5 * np.cos(theta) * (half + root), 0.5 * np.cos(theta) * (half - root)


def _eta_minimum_analytic(alpha: float) -> float:
    def lowest(theta: float) -> float:
        return min(eta_eigenvalues(theta, alpha))

    grid = np.linspace(0.0, np.pi, 2001)
    values = np.array([lowest(t) for t in grid])
    k = int(np.argmin(values))
    low, high = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    refined = scipy.optimize.minimize_scalar(
        lowest, bounds=(low, high), method="bounded", options={"xatol": 1e-12}
    )
    return float(min(values[k], refined.fun))


def eta_operator(alpha: float, d: int) -> Operator:
    """(e^{iα}T + e^{-iα}T²)/2, whose product-state expectation is Re(e^{iα}⟨abc|T|abc⟩)."""
    p = build_permutations(d, 3)
    phase = complex(np.exp(1j * alpha))
    return ((phase * p["T"] + phase.conjugate() * p["T2"]) / 2).as_hermitian()


def extremize_eta(
    alpha: float, d: int = 2, mode: str = "analytic", cfg: SeesawConfig | None = None
) -> float:
    """Minimum over product states of Re(e^{iα}⟨abc|T|abc⟩).

    Args:
        alpha: Phase α.
        d: Local dimension for the numeric mode; the minimum does not depend on d.
        mode: "analytic" minimizes the closed-form eigenvalue over θ;
            "numeric" runs the product-state see-saw.
        cfg: See-saw settings for the numeric mode.

    Raises:
        UnsupportedCombinationError: For an unknown mode.
    """
    if mode == "analytic":
        return _eta_minimum_analytic(alpha)
    if mode == "numeric":
        return product_extremum(eta_operator(alpha, d), cfg or SeesawConfig(), maximize=False).value
    raise UnsupportedCombinationError("eta mode", mode, ["analytic", "numeric"])


def _cut_tensor(w: Operator, party: int) -> ComplexArray:
    """W reshaped as [x, YZ, x', YZ'] with party X moved to the front."""
    d = w.local_dim
    order = [party - 1] + [k for k in range(3) if k != party - 1]
    axes = order + [k + 3 for k in order]
    return w.entries.reshape((d,) * 6).transpose(axes).reshape(d, d * d, d, d * d)


def biseparable_optimum(
    w: Operator, cfg: SeesawConfig, initial: BiseparableState | None = None
) -> OptimizationResult:
    """Max of ⟨η|⟨μ|W|η⟩|μ⟩ over the three cuts X|YZ, by alternating eigenvector updates.

    Raises:
        DimensionError: If W is not a three-party operator.
    """
    if w.parties != 3:
        raise DimensionError(f"biseparable_max needs three parties, got {w.parties}")
    d = w.local_dim
    best: OptimizationResult | None = None
    for party in (1, 2, 3):
        tensor = _cut_tensor(w, party)

        def sweep(factors: list[ComplexArray], history: list[float], t: ComplexArray = tensor) -> float:
            eta, mu = factors
            on_rest = np.einsum("a,abxy,x->by", eta.conj(), t, eta)
            value, factors[1] = _select_eigenvector(on_rest, mu, True)
            history.append(value)
            _check_monotone(history, True)
            on_x = np.einsum("b,abxy,y->ax", factors[1].conj(), t, factors[1])
            value, factors[0] = _select_eigenvector(on_x, eta, True)
            history.append(value)
            _check_monotone(history, True)
            return value

        def start(rng: np.random.Generator) -> list[ComplexArray]:
            return [random_unit_vector(d, rng), random_unit_vector(d * d, rng)]

        warm = [initial.eta, initial.mu] if initial is not None and initial.party == party else None
        run, nonconverged = _run_restarts(cfg, f"bisep{party}", True, sweep, start, warm)
        candidate = OptimizationResult(
            value=run.value,
            argument=BiseparableState(party, run.factors[0], run.factors[1]),
            restarts_used=cfg.restarts,
            converged=run.converged,
            iterations=run.iterations,
            nonconverged_restarts=nonconverged,
            history=run.history,
        )
        if best is None or candidate.value > best.value:
            best = candidate
    assert best is not None
    return best


def biseparable_max(w: Operator, cfg: SeesawConfig) -> float:
    """Largest ⟨W⟩ over biseparable states (pure states suffice by convexity)."""
    return biseparable_optimum(w, cfg).value


def invariant_biseparable_optimum(w: Operator) -> OptimizationResult:
    """Biseparable optimum of a U⊗3-invariant W.

    Invariance lets the single party sit at |0⟩, so the maximum over each cut is
    the top eigenvalue of ⟨0|W|0⟩ on the other two parties.
    """
    d = w.local_dim
    anchor = np.zeros(d, dtype=np.complex128)
    anchor[0] = 1.0
    best: OptimizationResult | None = None
    for party in (1, 2, 3):
        values, vectors = scipy.linalg.eigh(conditional_observable(w, party, anchor).entries)
        if best is None or values[-1] > best.value:
            best = OptimizationResult(
                value=float(values[-1]),
                argument=BiseparableState(party, anchor, vectors[:, -1]),
                restarts_used=0,
                converged=True,
                iterations=1,
            )
    assert best is not None
    return best


def invariant_biseparable_max(w: Operator) -> float:
    """Biseparable maximum of a U⊗3-invariant W."""
    return invariant_biseparable_optimum(w).value


def fully_separable_optimum(
    w: Operator, cfg: SeesawConfig, initial: Sequence[ComplexArray] | None = None
) -> OptimizationResult:
    """Max of ⟨abc|W|abc⟩ over product states, with the optimizer."""
    return product_extremum(w, cfg, maximize=True, initial=initial)


def fully_separable_max(w: Operator, cfg: SeesawConfig) -> float:
    """Largest ⟨W⟩ over fully separable states."""
    return fully_separable_optimum(w, cfg).value


def chi_norm_max(d: int, n: int, cfg: SeesawConfig | None = None) -> ChiNormResult:
    """Max of ⟨χ|χ⟩ = |z|²(|b_n|²+|c_n|²) + 2Re(z*² b_n* c_n ⟨c|b⟩) over unit b, c.

    χ_i = z* b_n* c_i* + z c_n* b_i* is linear in b* for fixed c and in c* for
    fixed b, so each half-step is a top-eigenvector problem.

    Raises:
        DimensionError: If n is outside 0..d-1.
    """
    if not 0 <= n < d:
        raise DimensionError(f"index n must satisfy 0 <= n < {d}, got {n}")
    cfg = cfg or SeesawConfig()
    z = default_z(d)
    unit_n = np.zeros(d, dtype=np.complex128)
    unit_n[n] = 1.0
    eye = np.eye(d, dtype=np.complex128)

    def sweep(factors: list[ComplexArray], history: list[float]) -> float:
        b, c = factors
        # χ = M_c b*
        m_c = z.conjugate() * np.outer(c.conj(), unit_n) + z * c[n].conjugate() * eye
        value, u = _select_eigenvector(m_c.conj().T @ m_c, b.conj(), True)
        factors[0] = u.conj()
        history.append(value)
        _check_monotone(history, True)
        b = factors[0]
        # χ = M_b c*
        m_b = z.conjugate() * b[n].conjugate() * eye + z * np.outer(b.conj(), unit_n)
        value, v = _select_eigenvector(m_b.conj().T @ m_b, c.conj(), True)
        factors[1] = v.conj()
        history.append(value)
        _check_monotone(history, True)
        return value

    def start(rng: np.random.Generator) -> list[ComplexArray]:
        return [random_unit_vector(d, rng), random_unit_vector(d, rng)]

    best, _ = _run_restarts(cfg, "chi", True, sweep, start, None)
    b, c = best.factors
    return ChiNormResult(
        value=best.value,
        b_weight=float(abs(b[n]) ** 2),
        c_weight=float(abs(c[n]) ** 2),
    )


def flip_conjugate_analytic_bound(
    d: int, cfg: SeesawConfig | None = None, verify: bool = True
) -> FlipConjugateBound:
    """1 - d/(d²-1), with an optional numerical check against G(|φ_0⟩).

    Raises:
        DimensionError: If d < 2.
    """
    if d < 2:
        raise DimensionError(f"local dimension must be >= 2, got {d}")
    bound = 1.0 - d / (d**2 - 1)
    measured = None
    if verify:
        measured = geometric_measure(flip_conjugate_vector(0, d, default_z(d)), cfg or SeesawConfig())
    return FlipConjugateBound(bound=bound, measured=measured)
