"""
Repeated-confirmation purification runs and the tau search.

Only the post-selected branch is modelled: every confirmation of the probe
state (including the zeroth one) succeeds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    NoFeasiblePoint,
    NotOptimalWarning,
    NoUniqueTarget,
    NoUniqueTargetWarning,
    ValidationError,
    ZeroProjectionProbability,
)
from .linalg import DEFAULT_DEGENERACY_TOL, evolve, hermitian_eigendecompose, unitary_evolution
from .qubits import (
    DensityMatrix,
    HamiltonianSpec,
    ProbeState,
    SINGLE_QUBIT_STATES,
    build_hamiltonian,
    probe_vector,
    product_state,
    thermal_state,
)
from .spectral import SpectralReport, projected_evolution, spectral_report

MIN_PROJECTION_PROBABILITY = 1e-15
# gap ratios closer than this count as tied in the tau search
GAP_TIE_TOL = 1e-12


@dataclass(frozen=True)
class InitialPreset:
    """
    Named initial state.

    ``kind`` is one of ``thermal`` (uses ``beta``), ``product`` (uses
    ``labels``, one single-qubit label per site) or ``maximally_mixed_a``
    (X in the single-qubit state ``x_state``, everything else maximally mixed).
    """

    kind: str
    beta: Optional[float] = None
    labels: Tuple[str, ...] = ()
    x_state: str = "up"

    def __post_init__(self):
        if self.kind == "thermal":
            if self.beta is None or not math.isfinite(self.beta) or self.beta < 0:
                raise ValidationError("thermal preset needs a finite beta >= 0")
        elif self.kind == "product":
            if not self.labels:
                raise ValidationError("product preset needs state labels")
            unknown = [lab for lab in self.labels if lab not in SINGLE_QUBIT_STATES]
            if unknown:
                raise ValidationError(f"unknown single-qubit state(s) {', '.join(unknown)}")
        elif self.kind == "maximally_mixed_a":
            if self.x_state not in SINGLE_QUBIT_STATES:
                raise ValidationError(f"unknown x_state {self.x_state!r}")
        else:
            raise ValidationError(f"unknown initial preset {self.kind!r}")
        object.__setattr__(self, "labels", tuple(self.labels))

    def resolve(self, spec: HamiltonianSpec) -> DensityMatrix:
        if self.kind == "thermal":
            return thermal_state(build_hamiltonian(spec), self.beta)
        if self.kind == "product":
            if len(self.labels) != spec.n_qubits:
                raise ValidationError(
                    f"product preset has {len(self.labels)} labels for {spec.n_qubits} qubits"
                )
            return DensityMatrix.pure(product_state(self.labels))
        x = SINGLE_QUBIT_STATES[self.x_state]
        rest = spec.dim // 2
        return DensityMatrix(np.kron(np.outer(x, x.conj()), np.eye(rest) / rest))


@dataclass(frozen=True)
class RunConfig:
    hamiltonian: HamiltonianSpec
    probe: ProbeState
    tau: float
    n_steps: int
    initial_state: Union[DensityMatrix, InitialPreset]

    def __post_init__(self):
        problems = []
        if not (math.isfinite(self.tau) and self.tau > 0):
            problems.append(f"tau must be positive, got {self.tau}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            problems.append(f"n_steps must be an integer >= 1, got {self.n_steps}")
        if isinstance(self.initial_state, DensityMatrix) and self.initial_state.dim != self.hamiltonian.dim:
            problems.append(
                f"initial state has dimension {self.initial_state.dim}, Hamiltonian {self.hamiltonian.dim}"
            )
        if problems:
            raise ValidationError(problems)

    def initial_density(self) -> DensityMatrix:
        if isinstance(self.initial_state, DensityMatrix):
            return self.initial_state
        return self.initial_state.resolve(self.hamiltonian)

    def projected(self) -> np.ndarray:
        U = unitary_evolution(build_hamiltonian(self.hamiltonian), self.tau)
        return projected_evolution(U, probe_vector(self.probe))


@dataclass
class PurificationTrace:
    """
    Conditional states and statistics after each successful confirmation.

    Index 0 is the state right after the zeroth measurement. ``warning`` is
    ``"no_unique_target"`` when the dominant eigenvalue is tied in modulus, in
    which case ``target`` is merely the first-listed dominant eigenvector.
    """

    steps: int
    rho_A: List[DensityMatrix]
    fidelity: np.ndarray
    probability: np.ndarray
    target: np.ndarray
    report: SpectralReport
    warning: Optional[str] = None


def _reduce_on_probe(rho: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """``<phi|_X rho |phi>_X`` (unnormalised)."""
    rest = rho.shape[0] // 2
    return np.einsum("x,xayb,y->ab", phi.conj(), rho.reshape(2, rest, 2, rest), phi)


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def run_purification(cfg: RunConfig, tol: float = DEFAULT_DEGENERACY_TOL) -> PurificationTrace:
    """
    Simulate ``cfg.n_steps`` successful confirmations of the probe state.

    The conditional state is renormalised every step and the success
    probability is accumulated as a running product, so long runs do not
    underflow.
    """
    phi = probe_vector(cfg.probe)
    rho_tot = cfg.initial_density().matrix
    rho_a = _reduce_on_probe(rho_tot, phi)
    p0 = float(np.real(np.trace(rho_a)))
    if p0 <= MIN_PROJECTION_PROBABILITY:
        raise ZeroProjectionProbability(f"zeroth confirmation has probability {p0:.3e}")
    rho_a = _hermitize(rho_a / p0)

    V = cfg.projected()
    report = spectral_report(V, tol)
    target = report.target
    warning = None
    if not report.flags.unique_max:
        warning = "no_unique_target"
        warnings.warn(
            "dominant eigenvalue is not unique; fidelity is measured against the first-listed eigenvector",
            NoUniqueTargetWarning,
            stacklevel=2,
        )

    states = [DensityMatrix(rho_a)]
    probs = [p0]
    fids = [float(np.real(np.vdot(target, rho_a @ target)))]
    Vh = V.conj().T
    p = p0
    for n in range(1, cfg.n_steps + 1):
        nxt = V @ rho_a @ Vh
        w = float(np.real(np.trace(nxt)))
        if w <= 0.0:
            raise ZeroProjectionProbability(f"success probability vanished at step {n}")
        rho_a = _hermitize(nxt / w)
        p *= w
        states.append(DensityMatrix(rho_a))
        probs.append(p)
        fids.append(float(np.real(np.vdot(target, rho_a @ target))))

    return PurificationTrace(
        steps=cfg.n_steps,
        rho_A=states,
        fidelity=np.array(fids),
        probability=np.array(probs),
        target=target,
        report=report,
        warning=warning,
    )


def asymptotic_probability(cfg: RunConfig, tol: float = DEFAULT_DEGENERACY_TOL) -> float:
    """
    Limit of the success probability, ``<phi v0| rho_tot |phi v0>``.

    Returns 0 with a ``NotOptimalWarning`` when ``|lam0| < 1``, since the
    probability then decays geometrically.
    """
    report = spectral_report(cfg.projected(), tol)
    if not (report.flags.unique_max and report.flags.nondegenerate_max):
        raise NoUniqueTarget("dominant eigenvalue is not unique and nondegenerate; the limit is undefined")
    if report.moduli[0] < 1.0 - tol:
        warnings.warn(
            f"|lam0| = {report.moduli[0]:.6g} < 1: success probability decays to zero",
            NotOptimalWarning,
            stacklevel=2,
        )
        return 0.0
    ket = np.kron(probe_vector(cfg.probe), report.dominant_left.conj())
    rho = cfg.initial_density().matrix
    return float(np.real(np.vdot(ket, rho @ ket)))


@dataclass(frozen=True)
class TauGrid:
    """Inclusive uniform grid ``start, start + step, ..., stop``."""

    start: float
    stop: float
    step: float

    def __post_init__(self):
        if not (self.step > 0 and self.stop >= self.start):
            raise ValidationError(f"invalid tau grid {self.start}:{self.stop}:{self.step}")

    def values(self) -> np.ndarray:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(count)


@dataclass(frozen=True)
class OptimizationResult:
    tau: float
    gap_ratio: float
    report: SpectralReport


def optimize_tau(
    hamiltonian: HamiltonianSpec,
    probe: ProbeState,
    tau_grid: Union[TauGrid, Sequence[float]],
    tol: float = DEFAULT_DEGENERACY_TOL,
) -> OptimizationResult:
    """
    Grid search for the fastest purification.

    Among grid points where the dominant eigenvalue is unique and of unit
    modulus, pick the one with the smallest gap ratio; ties (within
    ``GAP_TIE_TOL``) go to the smaller tau.
    """
    taus = tau_grid.values() if isinstance(tau_grid, TauGrid) else np.asarray(list(tau_grid), dtype=float)
    if taus.size == 0:
        raise ValidationError("tau grid is empty")
    if np.any(taus <= 0):
        raise ValidationError("tau grid must contain only positive values")

    es = hermitian_eigendecompose(build_hamiltonian(hamiltonian))
    phi = probe_vector(probe)
    best: Optional[Tuple[float, float, SpectralReport]] = None
    for tau in sorted(float(t) for t in taus):
        report = spectral_report(projected_evolution(evolve(es, tau), phi), tol)
        if not (report.flags.unique_max and report.flags.optimal_modulus):
            continue
        if best is None or report.gap_ratio < best[1] - GAP_TIE_TOL:
            best = (tau, report.gap_ratio, report)
    if best is None:
        raise NoFeasiblePoint("no grid point gives a unique dominant eigenvalue of unit modulus")
    return OptimizationResult(*best)
