"""A small dense SDP solver and the invariant-state problems built on it.

`solve_lmi` minimizes c·x subject to affine Hermitian blocks F_b(x) ⪰ 0 and
linear equalities. Equalities are eliminated through a null-space basis; the
remaining problem is solved by a log-det barrier method (Newton centering with
backtracking, t multiplied by MU per outer step). A phase-I problem that shifts
every block by s·1 supplies a strictly feasible start when none is given.

The formulations below exploit U⊗U⊗U invariance: an invariant state is
ρ = r0·1 + r12 F12 + r13 F13 + r23 F23 + t T + t* T², six real parameters.
Twirling leaves the witness expectations and every PSD / PPT constraint
invariant, so restricting to invariant states loses nothing. The 𝕎 pair uses
the same parametrization with every basis operator partially transposed on
party 1.
"""

from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from entlab.errors import (
    DimensionError,
    NotConvergedError,
    SizeCapError,
    SolverError,
    UnsupportedCombinationError,
)
from entlab.linalg import (
    ComplexArray,
    Operator,
    RealArray,
    as_generator,
    haar_random_unitary,
    kron_all,
    partial_transpose,
)
from entlab.subspaces import build_permutations, subspace_traces, tripartite_projectors
from entlab.validation import ValidationResult, validate_density_matrix
from entlab.witnesses import (
    build_gme_witnesses,
    build_pt_witnesses,
    conditional_observable,
    permutation_witnesses,
    spectral_coefficients,
)

# Barrier parameters
MU = 10.0
T_INITIAL = 1.0
NEWTON_TOL = 1e-10
# Newton steps per centering (round-off can hold the decrement above NEWTON_TOL at large t)
CENTERING_STEPS = 60
MIN_STEP = 1e-14
ARMIJO = 0.25

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 800
COEFF_HERMITIAN_TOL = 1e-12
DEGENERACY_TOL = 1e-9

OVERLAP_SIZE_CAP = 6
GME_BOX = 1e3

INVARIANT_NAMES = ("r0", "r12", "r13", "r23", "re_t", "im_t")


class SdpStatus(str, Enum):
    """Termination status of solve_lmi."""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    MAX_ITER = "max_iter"


class BoundaryFamily(str, Enum):
    """State sets whose support function invariant_boundary evaluates."""

    QUANTUM = "quantum"
    PPT_ALL = "ppt_all"
    PPT_SINGLE = "ppt_single"


class WitnessPair(str, Enum):
    """Witness pairs spanning a state-space plane."""

    W = "w"
    WPT = "wpt"


@dataclass(frozen=True, eq=False)
class LmiBlock:
    """Affine Hermitian map x ↦ constant + Σ x_i coefficients[i]."""

    constant: ComplexArray
    coefficients: ComplexArray
    label: str = ""

    def __post_init__(self) -> None:
        constant = np.asarray(self.constant, dtype=np.complex128)
        coefficients = np.asarray(self.coefficients, dtype=np.complex128)
        n = constant.shape[0]
        if constant.shape != (n, n) or coefficients.ndim != 3 or coefficients.shape[1:] != (n, n):
            raise DimensionError(
                f"block {self.label!r}: constant {constant.shape} and coefficients "
                f"{coefficients.shape} do not match"
            )
        adjoints = coefficients.conj().transpose(0, 2, 1)
        scale = max(
            1.0,
            float(np.max(np.abs(coefficients), initial=0.0)),
            float(np.max(np.abs(constant))),
        )
        deviation = max(
            float(np.max(np.abs(constant - constant.conj().T))),
            float(np.max(np.abs(coefficients - adjoints), initial=0.0)),
        )
        if deviation > COEFF_HERMITIAN_TOL * scale:
            raise SolverError(f"block {self.label!r} is not Hermitian (deviation {deviation:.3g})")
        object.__setattr__(self, "constant", (constant + constant.conj().T) / 2)
        object.__setattr__(
            self, "coefficients", (coefficients + adjoints) / 2
        )

    @property
    def size(self) -> int:
        return int(self.constant.shape[0])

    def evaluate(self, x: RealArray) -> ComplexArray:
        return self.constant + np.tensordot(x, self.coefficients, axes=1)


@dataclass(frozen=True, eq=False)
class LmiProblem:
    """Minimize objective·x subject to every block ⪰ 0 and equalities·x = rhs.

    Attributes:
        objective: Real cost vector c of length m.
        blocks: Affine Hermitian blocks in the m variables.
        equalities: k×m real matrix (k may be zero).
        rhs: Right-hand side of length k.
        initial: Optional strictly feasible starting point.
    """

    objective: RealArray
    blocks: list[LmiBlock]
    equalities: RealArray = field(default_factory=lambda: np.zeros((0, 0)))
    rhs: RealArray = field(default_factory=lambda: np.zeros(0))
    initial: RealArray | None = None

    def __post_init__(self) -> None:
        m = self.num_vars
        for block in self.blocks:
            if block.coefficients.shape[0] != m:
                raise DimensionError(
                    f"block {block.label!r} has {block.coefficients.shape[0]} coefficients, expected {m}"
                )
        if self.equalities.size:
            if self.equalities.shape != (self.rhs.shape[0], m):
                raise DimensionError(
                    f"equalities {self.equalities.shape} do not match rhs {self.rhs.shape} and m={m}"
                )

    @property
    def num_vars(self) -> int:
        return int(np.asarray(self.objective).shape[0])


@dataclass(frozen=True, eq=False)
class SdpSolution:
    """Solver output.

    Attributes:
        status: optimal, infeasible or max_iter.
        x: Final (strictly feasible unless infeasible) point.
        objective: c·x at that point.
        min_block_eigs: Smallest eigenvalue of every block at x.
        gap_estimate: Barrier duality-gap estimate (total block size / t).
        iterations: Newton steps over both phases.
    """

    status: SdpStatus
    x: RealArray
    objective: float
    min_block_eigs: RealArray
    gap_estimate: float
    iterations: int = 0

    @property
    def dual_bound(self) -> float:
        """Lower bound on the true minimum from the barrier gap."""
        return self.objective - self.gap_estimate

    @property
    def optimal(self) -> bool:
        return self.status is SdpStatus.OPTIMAL


@dataclass(frozen=True)
class InvariantState:
    """Six-parameter invariant operator r0·1 + Σ r_ij F_ij + t T + t* T².

    With pt_party set, each basis operator is partially transposed on that
    party (the U*⊗U⊗U-invariant family for party 1).
    """

    local_dim: int
    coeffs: tuple[float, ...]
    pt_party: int | None = None

    @classmethod
    def from_spectral(
        cls, d: int, a: float, b: float, c_j: float, c_jbar: float
    ) -> InvariantState:
        """aΠ_A + bΠ_S + c_J Π_J + c_J̄ Π_J̄ in permutation coordinates."""
        omega = complex(np.exp(2j * np.pi / 3))
        t = (a + b) / 6 + (c_j * omega.conjugate() + c_jbar * omega) / 3
        flip = (b - a) / 6
        r0 = (a + b) / 6 + (c_j + c_jbar) / 3
        return cls(d, (r0, flip, flip, flip, t.real, t.imag))

    @classmethod
    def maximally_mixed(cls, d: int, pt_party: int | None = None) -> InvariantState:
        return cls(d, (1.0 / d**3, 0.0, 0.0, 0.0, 0.0, 0.0), pt_party)

    def operator(self) -> Operator:
        basis = invariant_basis(self.local_dim, self.pt_party)
        matrix = np.tensordot(np.asarray(self.coeffs), basis, axes=1)
        return Operator(matrix, 3, self.local_dim, True)

    def validate(self) -> ValidationResult:
        """Check that the assembled operator is a density matrix."""
        return validate_density_matrix(self.operator().entries)


@dataclass(frozen=True)
class BoundaryPoint:
    """Support-function value in direction θ and the maximizing expectation pair."""

    theta: float
    family: str
    value: float
    point: tuple[float, float]


@dataclass(frozen=True)
class GmeVerdict:
    """Outcome of gme_decide.

    Attributes:
        verdict: "GME" or "biseparable".
        optimum: min Tr(ρW) over invariant witnesses with Tr W = d³.
        witness: Optimal W in permutation coordinates.
        p_value: Tr(Pρ), or None for d = 2.
        pbar_value: Tr(P̄ρ), or None for d = 2.
    """

    verdict: str
    optimum: float
    witness: tuple[float, ...]
    p_value: float | None
    pbar_value: float | None

    @property
    def is_gme(self) -> bool:
        return self.verdict == "GME"


@dataclass(frozen=True)
class PptGmeRow:
    """One pin of the PPT-GME sweep."""

    a: float
    b: float
    c: float
    w_minus: float
    w_plus: float
    min_pt_eig: float
    p_value: float
    verdict: str


@dataclass(frozen=True)
class PptGmeSweep:
    """Rows in ascending ⟨W+⟩ order, plus a note when nothing can be found."""

    local_dim: int
    rows: list[PptGmeRow]
    note: str = ""

    def gme_rows(self, threshold: float = 1e-4) -> list[PptGmeRow]:
        return [r for r in self.rows if r.verdict == "GME" and r.a >= threshold]


# Solver


@dataclass
class _Reduced:
    x0: RealArray
    basis: RealArray
    cost: RealArray
    blocks: list[tuple[ComplexArray, ComplexArray]]


def _reduce(problem: LmiProblem) -> _Reduced | None:
    """Eliminate equalities: x = x0 + N y. Returns None if they are inconsistent."""
    m = problem.num_vars
    c = np.asarray(problem.objective, dtype=np.float64)
    if problem.equalities.size:
        eq = np.asarray(problem.equalities, dtype=np.float64)
        rhs = np.asarray(problem.rhs, dtype=np.float64)
        x0 = np.linalg.lstsq(eq, rhs, rcond=None)[0]
        if np.linalg.norm(eq @ x0 - rhs) > 1e-9 * max(1.0, float(np.linalg.norm(rhs))):
            return None
        basis = scipy.linalg.null_space(eq)
    else:
        x0 = np.zeros(m)
        basis = np.eye(m)
    blocks = [
        (b.evaluate(x0), np.einsum("ip,inm->pnm", basis, b.coefficients))
        for b in problem.blocks
    ]
    return _Reduced(x0=x0, basis=basis, cost=basis.T @ c, blocks=blocks)


def _cholesky_all(blocks: list[tuple[ComplexArray, ComplexArray]], y: RealArray) -> list[ComplexArray] | None:
    factors = []
    for constant, coefficients in blocks:
        matrix = constant + np.tensordot(y, coefficients, axes=1)
        try:
            factors.append(np.linalg.cholesky(matrix))
        except np.linalg.LinAlgError:
            return None
    return factors


def _log_barrier(factors: list[ComplexArray]) -> float:
    return -sum(2.0 * float(np.sum(np.log(np.real(np.diag(f))))) for f in factors)


def _barrier_derivatives(
    blocks: list[tuple[ComplexArray, ComplexArray]], factors: list[ComplexArray]
) -> tuple[RealArray, RealArray]:
    """Gradient and Hessian of -Σ log det F_b(y).

    With F = L L^H and B_i = L^{-1} A_i L^{-H}: grad_i = -Σ Tr B_i and
    H_ij = Σ Tr(B_i B_j).
    """
    p = blocks[0][1].shape[0]
    grad = np.zeros(p)
    hess = np.zeros((p, p))
    for (_, coefficients), chol in zip(blocks, factors, strict=True):
        inverse = scipy.linalg.solve_triangular(chol, np.eye(chol.shape[0]), lower=True)
        scaled = inverse @ coefficients @ inverse.conj().T
        grad -= np.real(np.trace(scaled, axis1=1, axis2=2))
        flat = scaled.reshape(p, -1)
        hess += np.real(flat @ flat.conj().T)
    return grad, hess


def _newton_direction(hess: RealArray, grad: RealArray) -> RealArray:
    try:
        return scipy.linalg.solve(hess, -grad, assume_a="pos")
    except (np.linalg.LinAlgError, ValueError):
        return np.linalg.lstsq(hess, -grad, rcond=None)[0]


def _center(
    cost: RealArray,
    blocks: list[tuple[ComplexArray, ComplexArray]],
    y: RealArray,
    t: float,
    budget: int,
    stop: Callable[[RealArray], bool] | None = None,
) -> tuple[RealArray, int, bool]:
    """Newton centering at barrier weight t. Returns (y, steps, stopped_early)."""
    factors = _cholesky_all(blocks, y)
    if factors is None:
        raise SolverError("centering started outside the strict interior")
    steps = 0
    while steps < budget:
        grad, hess = _barrier_derivatives(blocks, factors)
        grad = t * cost + grad
        dy = _newton_direction(hess, grad)
        slope = float(grad @ dy)
        if -slope / 2 <= NEWTON_TOL:
            break
        current = t * float(cost @ y) + _log_barrier(factors)
        step = 1.0
        while step > MIN_STEP:
            candidate = y + step * dy
            trial = _cholesky_all(blocks, candidate)
            if trial is not None:
                value = t * float(cost @ candidate) + _log_barrier(trial)
                if value <= current + ARMIJO * step * slope:
                    break
            step /= 2
        else:
            # no descent left at double precision
            break
        y, factors = candidate, trial
        steps += 1
        if stop is not None and stop(y):
            return y, steps, True
    return y, steps, False


def _barrier(
    cost: RealArray,
    blocks: list[tuple[ComplexArray, ComplexArray]],
    y: RealArray,
    tol: float,
    max_iter: int,
    stop: Callable[[RealArray], bool] | None = None,
    offset: float = 0.0,
) -> tuple[RealArray, float, int, bool, bool]:
    """Path-following loop. Returns (y, t, steps, converged, stopped_early).

    Converged means the barrier gap total/t is below tol relative to
    max(1, |objective|), where the objective is offset + cost·y.
    """
    total = sum(constant.shape[0] for constant, _ in blocks)
    t = T_INITIAL
    steps = 0
    while True:
        y, used, stopped = _center(cost, blocks, y, t, min(CENTERING_STEPS, max_iter - steps), stop)
        steps += used
        if stopped:
            return y, t, steps, False, True
        if total / t <= tol * max(1.0, abs(offset + float(cost @ y))):
            return y, t, steps, True, False
        if steps >= max_iter:
            return y, t, steps, False, False
        t *= MU


def _phase_one(
    blocks: list[tuple[ComplexArray, ComplexArray]], y: RealArray, tol: float, max_iter: int
) -> tuple[RealArray | None, int]:
    """Find y with every block ≻ 0 by minimizing s subject to F_b(y) + s·1 ⪰ 0."""
    lowest = min(
        float(np.linalg.eigvalsh(constant + np.tensordot(y, coefficients, axes=1))[0])
        for constant, coefficients in blocks
    )
    shift = max(0.0, -lowest) + 1.0
    augmented = [
        (constant, np.concatenate([coefficients, np.eye(constant.shape[0])[None]], axis=0))
        for constant, coefficients in blocks
    ]
    cost = np.zeros(y.shape[0] + 1)
    cost[-1] = 1.0

    def below_zero(z: RealArray) -> bool:
        return bool(z[-1] < 0.0)

    z, _, steps, _, stopped = _barrier(
        cost, augmented, np.append(y, shift), tol, max_iter, below_zero
    )
    if not stopped:
        return None, steps
    return z[:-1], steps


def _min_eigs(problem: LmiProblem, x: RealArray) -> RealArray:
    return np.array([float(np.linalg.eigvalsh(b.evaluate(x))[0]) for b in problem.blocks])


def solve_lmi(
    problem: LmiProblem, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> SdpSolution:
    """Minimize c·x subject to the problem's blocks and equalities.

    Args:
        problem: The LMI problem.
        tol: Target barrier gap (total block size / t), relative to
            max(1, |c·x|).
        max_iter: Newton-step budget of each phase.

    Returns:
        SdpSolution; status is infeasible when the equalities are inconsistent
        or phase I finds no strictly feasible point.
    """
    c = np.asarray(problem.objective, dtype=np.float64)
    reduced = _reduce(problem)
    if reduced is None:
        x = np.zeros(problem.num_vars)
        return SdpSolution(SdpStatus.INFEASIBLE, x, float("nan"), _min_eigs(problem, x), float("inf"))

    x0, basis = reduced.x0, reduced.basis
    if basis.shape[1] == 0:
        eigs = _min_eigs(problem, x0)
        lowest = float(eigs.min()) if eigs.size else 0.0
        status = SdpStatus.OPTIMAL if lowest >= -1e-9 else SdpStatus.INFEASIBLE
        return SdpSolution(status, x0, float(c @ x0), eigs, 0.0)

    y = np.zeros(basis.shape[1])
    if problem.initial is not None:
        y = basis.T @ (np.asarray(problem.initial, dtype=np.float64) - x0)
    steps = 0
    if _cholesky_all(reduced.blocks, y) is None:
        start, steps = _phase_one(reduced.blocks, y, tol, max_iter)
        if start is None:
            x = x0 + basis @ y
            return SdpSolution(
                SdpStatus.INFEASIBLE, x, float("nan"), _min_eigs(problem, x), float("inf"), steps
            )
        y = start

    y, t, used, converged, _ = _barrier(
        reduced.cost, reduced.blocks, y, tol, max_iter, offset=float(c @ x0)
    )
    x = x0 + basis @ y
    total = sum(b.size for b in problem.blocks)
    return SdpSolution(
        status=SdpStatus.OPTIMAL if converged else SdpStatus.MAX_ITER,
        x=x,
        objective=float(c @ x),
        min_block_eigs=_min_eigs(problem, x),
        gap_estimate=total / t,
        iterations=steps + used,
    )


def _require_optimal(solution: SdpSolution, method: str) -> SdpSolution:
    if solution.status is SdpStatus.MAX_ITER:
        raise NotConvergedError(method, solution.iterations, solution.gap_estimate)
    if solution.status is SdpStatus.INFEASIBLE:
        raise SolverError(f"{method}: problem reported infeasible")
    return solution


# Invariant states


def invariant_basis(d: int, pt_party: int | None = None) -> ComplexArray:
    """1, F12, F13, F23, T+T², i(T-T²) stacked as (6, d³, d³), optionally partially transposed."""
    p = build_permutations(d, 3)
    ops = [
        p["identity"],
        p["F12"],
        p["F13"],
        p["F23"],
        p["T"] + p["T2"],
        1j * (p["T"] - p["T2"]),
    ]
    if pt_party is not None:
        ops = [partial_transpose(o, {pt_party}) for o in ops]
    return np.stack([o.entries for o in ops])


def _pt_stack(stack: ComplexArray, d: int, party: int) -> ComplexArray:
    """Partial transpose on `party` of every matrix in a (k, d³, d³) stack."""
    k = stack.shape[0]
    tensor = stack.reshape((k,) + (d,) * 6)
    perm = list(range(7))
    perm[party], perm[party + 3] = perm[party + 3], perm[party]
    return tensor.transpose(perm).reshape(k, d**3, d**3)


def _traces_against(stack: ComplexArray, operator: ComplexArray) -> RealArray:
    """Tr(V_k · operator) for every V_k in the stack."""
    return np.real(np.einsum("kij,ji->k", stack, operator))


def witness_pair(d: int, pair: str | WitnessPair) -> tuple[Operator, Operator]:
    """(W-, W+) or (𝕎-, 𝕎+)."""
    kind = WitnessPair(pair)
    if kind is WitnessPair.W:
        w = permutation_witnesses(d)
        return w.minus, w.plus
    pt = build_pt_witnesses(d, 1)
    return pt.minus, pt.plus


def invariant_expectations(rho: Operator, pair: str | WitnessPair = WitnessPair.W) -> tuple[float, float]:
    """(⟨W-⟩, ⟨W+⟩) of a three-party state, or the 𝕎 pair."""
    minus, plus = witness_pair(rho.local_dim, pair)
    return (
        float(np.real(np.trace(rho.entries @ minus.entries))),
        float(np.real(np.trace(rho.entries @ plus.entries))),
    )


def invariant_projection(sigma: Operator, pt_party: int | None = None) -> InvariantState:
    """Exact twirl: Hilbert-Schmidt projection onto the six invariant operators."""
    if sigma.parties != 3:
        raise DimensionError(f"invariant projection needs three parties, got {sigma.parties}")
    basis = invariant_basis(sigma.local_dim, pt_party)
    gram = np.real(np.einsum("kij,lji->kl", basis, basis))
    rhs = _traces_against(basis, sigma.entries)
    # the six operators are linearly dependent for d = 2
    coeffs = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    return InvariantState(sigma.local_dim, tuple(float(v) for v in coeffs), pt_party)


def twirl(sigma: Operator, samples: int, seed: int | np.random.Generator) -> Operator:
    """Monte-Carlo average of U⊗3 σ U†⊗3 over Haar-random U."""
    if sigma.parties != 3:
        raise DimensionError(f"twirl needs three parties, got {sigma.parties}")
    rng = as_generator(seed)
    total = np.zeros_like(sigma.entries)
    for _ in range(samples):
        u = haar_random_unitary(sigma.local_dim, rng).entries
        big = kron_all([u, u, u])
        total += big @ sigma.entries @ big.conj().T
    return Operator(total / samples, 3, sigma.local_dim, True)


def _direction(d: int, theta: float, pair: str | WitnessPair) -> Operator:
    minus, plus = witness_pair(d, pair)
    return (np.cos(theta) * minus + np.sin(theta) * plus).as_hermitian()


def _boundary(
    d: int,
    theta: float,
    family: BoundaryFamily,
    party: int | None,
    pair: WitnessPair,
    tol: float,
) -> BoundaryPoint:
    witness = _direction(d, theta, pair)
    if family is BoundaryFamily.QUANTUM:
        values, vectors = scipy.linalg.eigh(witness.entries)
        # average over the top eigenspace so the support point is well defined
        top = vectors[:, values >= values[-1] - DEGENERACY_TOL * max(1.0, abs(values[-1]))]
        rho = Operator(top @ top.conj().T / top.shape[1], 3, d, True)
        return BoundaryPoint(theta, family.value, float(values[-1]), invariant_expectations(rho, pair))

    pt_party = 1 if pair is WitnessPair.WPT else None
    basis = invariant_basis(d, pt_party)
    zero = np.zeros((d**3, d**3), dtype=np.complex128)
    blocks = [LmiBlock(zero, basis, "rho")]
    if family is BoundaryFamily.PPT_ALL:
        parties = [1, 2, 3]
    elif party in (1, 2, 3):
        parties = [party]
    else:
        raise DimensionError(f"ppt_single needs party 1, 2 or 3, got {party}")
    blocks += [LmiBlock(zero, _pt_stack(basis, d, x), f"T{x}") for x in parties]
    trace_row = np.real(np.trace(basis, axis1=1, axis2=2))[None, :]
    problem = LmiProblem(
        objective=-_traces_against(basis, witness.entries),
        blocks=blocks,
        equalities=trace_row,
        rhs=np.array([1.0]),
        initial=np.array(InvariantState.maximally_mixed(d).coeffs),
    )
    solution = _require_optimal(solve_lmi(problem, tol), "invariant_boundary")
    state = InvariantState(d, tuple(float(v) for v in solution.x), pt_party)
    label = family.value if family is BoundaryFamily.PPT_ALL else f"ppt{parties[0]}"
    return BoundaryPoint(theta, label, -solution.objective, invariant_expectations(state.operator(), pair))


def _check_boundary_dim(d: int) -> None:
    if d not in (3, 4, 5):
        raise UnsupportedCombinationError("boundary dimension", d, (3, 4, 5))


def invariant_boundary(
    d: int,
    theta: float,
    family: str | BoundaryFamily = BoundaryFamily.PPT_ALL,
    party: int | None = None,
    tol: float = DEFAULT_TOL,
) -> BoundaryPoint:
    """max ⟨cos θ W- + sin θ W+⟩ over a family of U⊗3-invariant states.

    Args:
        d: Local dimension.
        theta: Direction in the (⟨W-⟩, ⟨W+⟩) plane.
        family: quantum (top eigenvalue), ppt_all (PPT across every cut) or
            ppt_single (PPT across the cut of `party`).
        party: Party for ppt_single.
        tol: Barrier gap target.
    """
    _check_boundary_dim(d)
    return _boundary(d, theta, BoundaryFamily(family), party, WitnessPair.W, tol)


def pt_invariant_boundary(
    d: int,
    theta: float,
    family: str | BoundaryFamily = BoundaryFamily.PPT_ALL,
    party: int | None = None,
    tol: float = DEFAULT_TOL,
) -> BoundaryPoint:
    """Same as invariant_boundary for the 𝕎 pair over U*⊗U⊗U-invariant states."""
    _check_boundary_dim(d)
    return _boundary(d, theta, BoundaryFamily(family), party, WitnessPair.WPT, tol)


def pptmix_boundary(
    d: int, theta: float, pair: str | WitnessPair = WitnessPair.W, tol: float = DEFAULT_TOL
) -> BoundaryPoint:
    """Support function of the convex hull of the three single-cut PPT sets."""
    kind = WitnessPair(pair)
    points = [_boundary(d, theta, BoundaryFamily.PPT_SINGLE, x, kind, tol) for x in (1, 2, 3)]
    best = max(points, key=lambda p: p.value)
    return BoundaryPoint(theta, "pptmix", best.value, best.point)


def ppt_relaxed_overlap(y: Operator, tol: float = DEFAULT_TOL) -> float:
    """max Tr(Yρ) over two-party states with ρ^{T_B} ⪰ 0.

    The matrix variable is the full d²×d² Hermitian ρ in a real basis.

    Raises:
        DimensionError: If Y is not a two-party operator.
        SizeCapError: If d exceeds 6.
    """
    if y.parties != 2:
        raise DimensionError(f"ppt_relaxed_overlap needs a two-party operator, got {y.parties}")
    d = y.local_dim
    if d > OVERLAP_SIZE_CAP:
        raise SizeCapError("ppt_relaxed_overlap", d, OVERLAP_SIZE_CAP)
    dim = d * d
    basis = _hermitian_basis(dim)
    partial = basis.reshape(-1, d, d, d, d).transpose(0, 1, 4, 3, 2).reshape(-1, dim, dim)
    zero = np.zeros((dim, dim), dtype=np.complex128)
    initial = np.zeros(basis.shape[0])
    initial[:dim] = 1.0 / dim
    problem = LmiProblem(
        objective=-_traces_against(basis, y.entries),
        blocks=[LmiBlock(zero, basis, "rho"), LmiBlock(zero, partial, "rho^TB")],
        equalities=np.real(np.trace(basis, axis1=1, axis2=2))[None, :],
        rhs=np.array([1.0]),
        initial=initial,
    )
    return -_require_optimal(solve_lmi(problem, tol), "ppt_relaxed_overlap").objective


def _hermitian_basis(dim: int) -> ComplexArray:
    """Diagonal units, then E_jk + E_kj, then i(E_jk - E_kj) for j < k."""
    rows, cols = np.triu_indices(dim, k=1)
    count = dim + 2 * rows.size
    basis = np.zeros((count, dim, dim), dtype=np.complex128)
    basis[np.arange(dim), np.arange(dim), np.arange(dim)] = 1.0
    sym = dim + np.arange(rows.size)
    basis[sym, rows, cols] = 1.0
    basis[sym, cols, rows] = 1.0
    asym = dim + rows.size + np.arange(rows.size)
    basis[asym, rows, cols] = 1j
    basis[asym, cols, rows] = -1j
    return basis


def gme_decide(
    rho: InvariantState, tol: float = 1e-7, solver_tol: float = DEFAULT_TOL
) -> GmeVerdict:
    """Decide GME of a U⊗3-invariant state by one SDP.

    Minimizes Tr(ρW) over invariant W with ⟨0|W|0⟩ ⪰ 0 on every party and
    Tr W = d³ (box |w_k| ≤ 10³). An optimum below -tol certifies GME with W as
    witness; so does Tr(Pρ) < -tol or Tr(P̄ρ) < -tol.

    Raises:
        UnsupportedCombinationError: For states in the partially transposed family.
    """
    if rho.pt_party is not None:
        raise UnsupportedCombinationError("gme_decide state family", f"T{rho.pt_party}", ["U⊗U⊗U"])
    d = rho.local_dim
    basis = invariant_basis(d)
    ops = [Operator(v, 3, d) for v in basis]
    anchor = np.zeros(d, dtype=np.complex128)
    anchor[0] = 1.0
    blocks = []
    for party in (1, 2, 3):
        stack = np.stack([conditional_observable(v, party, anchor).entries for v in ops])
        blocks.append(LmiBlock(np.zeros((d * d, d * d), dtype=np.complex128), stack, f"<0|W|0>_{party}"))
    box_const = np.full(12, GME_BOX, dtype=np.complex128)
    box_coeff = np.zeros((6, 12, 12), dtype=np.complex128)
    for k in range(6):
        box_coeff[k, k, k] = -1.0
        box_coeff[k, 6 + k, 6 + k] = 1.0
    blocks.append(LmiBlock(np.diag(box_const), box_coeff, "box"))
    state = rho.operator().entries
    problem = LmiProblem(
        objective=_traces_against(basis, state),
        blocks=blocks,
        equalities=np.real(np.trace(basis, axis1=1, axis2=2))[None, :],
        rhs=np.array([float(d**3)]),
        initial=np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    )
    solution = _require_optimal(solve_lmi(problem, solver_tol), "gme_decide")
    p_value = pbar_value = None
    if d >= 3:
        gme = build_gme_witnesses(d)
        p_value = float(np.real(np.trace(state @ gme.P.entries)))
        pbar_value = float(np.real(np.trace(state @ gme.Pbar.entries)))
    detected = solution.objective < -tol or any(
        v is not None and v < -tol for v in (p_value, pbar_value)
    )
    return GmeVerdict(
        verdict="GME" if detected else "biseparable",
        optimum=solution.objective,
        witness=tuple(float(v) for v in solution.x),
        p_value=p_value,
        pbar_value=pbar_value,
    )


def ppt_gme_family_state(d: int, a: float, c: float) -> Operator:
    """aΠ_A + bΠ_S + cΠ_J̄ with b fixed by unit trace.

    Raises:
        DimensionError: If the implied b is negative.
    """
    traces = subspace_traces(d)
    b = (1.0 - a * traces["A"] - c * traces["Jbar"]) / traces["S"]
    if b < 0 or a < 0 or c < 0:
        raise DimensionError(f"coefficients (a={a}, b={b}, c={c}) are not all nonnegative")
    proj = tripartite_projectors(d)
    return (a * proj.A + b * proj.S + c * proj.Jbar).as_hermitian()


def _family_blocks(d: int) -> list[LmiBlock]:
    proj = tripartite_projectors(d)
    stack = np.stack([proj.A.entries, proj.S.entries, proj.Jbar.entries])
    zero = np.zeros((d**3, d**3), dtype=np.complex128)
    units = np.stack([np.diag(e) for e in np.eye(3)]).astype(np.complex128)
    blocks = [LmiBlock(np.zeros((3, 3), dtype=np.complex128), units, "abc")]
    blocks += [LmiBlock(zero, _pt_stack(stack, d, x), f"T{x}") for x in (1, 2, 3)]
    return blocks


def find_ppt_gme(
    d: int, sweep_points: int = 12, tol: float = DEFAULT_TOL, threads: int = 1
) -> PptGmeSweep:
    """Sweep ⟨W+⟩ and maximize a in aΠ_A + bΠ_S + cΠ_J̄ under PPT across all cuts.

    Every returned state is re-checked: Tr(Pρ) = -a Tr Π_A and gme_decide.
    Pins are solved independently, so the rows do not depend on `threads`.

    Raises:
        UnsupportedCombinationError: For d outside 2..4.
        NotConvergedError: If the range or any pin exhausts the Newton budget.
        SolverError: If a solve reports the pinned set infeasible.
    """
    if d not in (2, 3, 4):
        raise UnsupportedCombinationError("find_ppt_gme dimension", d, (2, 3, 4))
    if d == 2:
        return PptGmeSweep(d, [], note="Π_A vanishes for d = 2; PPT implies biseparable here")
    traces = subspace_traces(d)
    coeffs = spectral_coefficients(d)
    trace_row = np.array([traces["A"], traces["S"], traces["Jbar"]], dtype=np.float64)
    w_plus_row = trace_row * np.array([coeffs.c_A, coeffs.c_S, coeffs.c_J])
    blocks = _family_blocks(d)

    def solve(objective: RealArray, equalities: RealArray, rhs: RealArray) -> SdpSolution:
        return _require_optimal(solve_lmi(LmiProblem(objective, blocks, equalities, rhs), tol), "find_ppt_gme")

    low = solve(w_plus_row, trace_row[None, :], np.array([1.0]))
    high = solve(-w_plus_row, trace_row[None, :], np.array([1.0]))
    pins = np.linspace(low.objective, -high.objective, sweep_points + 2)[1:-1]
    proj = tripartite_projectors(d)
    gme = build_gme_witnesses(d)
    minus, _ = witness_pair(d, WitnessPair.W)

    def row_at(pin: float) -> PptGmeRow:
        solution = solve(np.array([-1.0, 0.0, 0.0]), np.vstack([trace_row, w_plus_row]), np.array([1.0, pin]))
        a, b, c = (max(0.0, float(v)) for v in solution.x)
        rho = (a * proj.A + b * proj.S + c * proj.Jbar).as_hermitian()
        min_pt = min(float(np.linalg.eigvalsh(partial_transpose(rho, {x}).entries)[0]) for x in (1, 2, 3))
        verdict = gme_decide(InvariantState.from_spectral(d, a, b, 0.0, c), solver_tol=tol)
        return PptGmeRow(
            a=a,
            b=b,
            c=c,
            w_minus=float(np.real(np.trace(rho.entries @ minus.entries))),
            w_plus=float(w_plus_row @ np.array([a, b, c])),
            min_pt_eig=min_pt,
            p_value=float(np.real(np.trace(rho.entries @ gme.P.entries))),
            verdict=verdict.verdict,
        )

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        rows = list(executor.map(row_at, (float(p) for p in pins)))
    return PptGmeSweep(d, rows)
