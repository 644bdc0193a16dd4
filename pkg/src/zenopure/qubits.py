"""
Qubit networks, probe states and initial density matrices.

Basis convention: every qubit uses the ordered basis (up, down), i.e. index 0
is the sigma_3 = +1 state. Tensor factors are ordered X, A, B, ..., so the
probe qubit X is always the leftmost (most significant) factor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from .errors import InvalidSpec
from .linalg import as_matrix, hermitian_eigendecompose, kron_all

UP = np.array([1.0, 0.0], dtype=np.complex128)
DOWN = np.array([0.0, 1.0], dtype=np.complex128)

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
# sigma_+ |down> = |up>
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
IDENTITY_2 = np.eye(2, dtype=np.complex128)
NUMBER = 0.5 * (IDENTITY_2 + SIGMA_3)


class Topology(str, enum.Enum):
    SINGLE_PAIR = "single_pair"
    CHAIN = "chain"
    STAR = "star"


@dataclass(frozen=True)
class HamiltonianSpec:
    """
    Declarative qubit network.

    ``frequencies`` are ordered X, A, B, ... . ``couplings`` are ordered
    X-A, A-B, ... for ``chain`` (and ``single_pair``, which is the two-site
    chain) and X-A, X-B, ... for ``star``.
    """

    topology: Topology
    frequencies: Tuple[float, ...]
    couplings: Tuple[float, ...]

    def __post_init__(self):
        try:
            topo = Topology(self.topology)
        except ValueError:
            raise InvalidSpec(f"unknown topology {self.topology!r}") from None
        object.__setattr__(self, "topology", topo)
        object.__setattr__(self, "frequencies", tuple(float(x) for x in self.frequencies))
        object.__setattr__(self, "couplings", tuple(float(x) for x in self.couplings))

        n = len(self.frequencies)
        if topo is Topology.SINGLE_PAIR and n != 2:
            raise InvalidSpec(f"single_pair needs 2 frequencies, got {n}")
        if n < 2:
            raise InvalidSpec("at least two qubits are required")
        if 2**n > 16:
            raise InvalidSpec(f"{n} qubits exceed the supported dimension of 16")
        if len(self.couplings) != n - 1:
            raise InvalidSpec(f"{topo.value} with {n} qubits needs {n - 1} couplings, got {len(self.couplings)}")
        values = self.frequencies + self.couplings
        if not all(math.isfinite(v) for v in values):
            raise InvalidSpec("frequencies and couplings must be finite")
        if any(g == 0.0 for g in self.couplings):
            raise InvalidSpec("couplings must be nonzero")

    @property
    def n_qubits(self) -> int:
        return len(self.frequencies)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def bonds(self) -> Tuple[Tuple[int, int], ...]:
        n = self.n_qubits
        if self.topology is Topology.STAR:
            return tuple((0, k) for k in range(1, n))
        return tuple((k, k + 1) for k in range(n - 1))

    @property
    def gbar(self) -> float:
        """Root-mean-square coupling; equals |g| when all couplings agree in size."""
        return math.sqrt(sum(g * g for g in self.couplings) / len(self.couplings))


def site_operator(op: np.ndarray, site: int, n_qubits: int) -> np.ndarray:
    factors = [IDENTITY_2] * n_qubits
    factors[site] = op
    return kron_all(factors)


def build_hamiltonian(spec: HamiltonianSpec) -> np.ndarray:
    """
    Total Hamiltonian of a spec: sum of Omega_k (1 + sigma_3)/2 plus exchange
    couplings g (s+ s- + s- s+) along each bond.
    """
    n = spec.n_qubits
    H = np.zeros((spec.dim, spec.dim), dtype=np.complex128)
    for k, om in enumerate(spec.frequencies):
        H += om * site_operator(NUMBER, k, n)
    for (i, j), g in zip(spec.bonds, spec.couplings):
        hop = site_operator(SIGMA_PLUS, i, n) @ site_operator(SIGMA_MINUS, j, n)
        H += g * (hop + hop.conj().T)
    return H


def excitation_number(n_qubits: int) -> np.ndarray:
    return sum(site_operator(NUMBER, k, n_qubits) for k in range(n_qubits))


@dataclass(frozen=True)
class ProbeState:
    """Direction (theta, phi) of the measured spin X."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise InvalidSpec(f"theta must lie in [0, pi], got {self.theta}")
        if not (0.0 <= self.phi < 2 * math.pi):
            raise InvalidSpec(f"phi must lie in [0, 2pi), got {self.phi}")


def probe_vector(p: ProbeState) -> np.ndarray:
    c, s = math.cos(p.theta / 2), math.sin(p.theta / 2)
    return np.array([np.exp(-0.5j * p.phi) * c, np.exp(0.5j * p.phi) * s], dtype=np.complex128)


def probe_orthogonal(p: ProbeState) -> np.ndarray:
    c, s = math.cos(p.theta / 2), math.sin(p.theta / 2)
    return np.array([np.exp(-0.5j * p.phi) * s, -np.exp(0.5j * p.phi) * c], dtype=np.complex128)


class DensityMatrix:
    """A validated density matrix: Hermitian, unit trace, positive semidefinite."""

    TOL = 1e-10

    def __init__(self, matrix, tol: float = TOL):
        rho = as_matrix(matrix, "density matrix")
        problems = []
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if herm > tol:
            problems.append(f"not Hermitian (violation {herm:.2e})")
        tr = np.trace(rho)
        if abs(tr - 1.0) > tol:
            problems.append(f"trace {tr.real:.12g} != 1")
        if not problems:
            lo = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
            if lo < -tol:
                problems.append(f"negative eigenvalue {lo:.2e}")
        if problems:
            raise ValueError("invalid density matrix: " + "; ".join(problems))
        rho.setflags(write=False)
        self._matrix = rho

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def expectation(self, vec: np.ndarray) -> float:
        return float(np.real(np.vdot(vec, self._matrix @ vec)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._matrix, dtype=dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"

    @classmethod
    def pure(cls, vec) -> "DensityMatrix":
        v = np.asarray(vec, dtype=np.complex128)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim)


def thermal_state(H, beta: float) -> DensityMatrix:
    """Gibbs state exp(-beta H) / Tr exp(-beta H); beta = 0 is maximally mixed."""
    if not math.isfinite(beta):
        raise ValueError("beta must be finite; use a large finite value for low temperature")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    es = hermitian_eigendecompose(H)
    E = es.eigenvalues
    # shift by the ground energy so large beta does not underflow
    weights = np.exp(-beta * (E - E.min()))
    weights /= weights.sum()
    U = es.eigenvectors
    rho = (U * weights) @ U.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T))


_SQ2 = 1.0 / math.sqrt(2.0)

SINGLE_QUBIT_STATES: Dict[str, np.ndarray] = {
    "up": UP,
    "down": DOWN,
    "right": _SQ2 * (UP + DOWN),
    "left": _SQ2 * (UP - DOWN),
}


def product_state(labels: Sequence[str]) -> np.ndarray:
    """Tensor product of named single-qubit states, e.g. ``["right", "up", "down"]``."""
    try:
        factors = [SINGLE_QUBIT_STATES[lab] for lab in labels]
    except KeyError as exc:
        raise InvalidSpec(f"unknown single-qubit state {exc.args[0]!r}") from None
    return kron_all(factors)


def standard_states() -> Dict[str, np.ndarray]:
    """Named single-qubit and two-qubit (Bell) states."""
    uu, ud = np.kron(UP, UP), np.kron(UP, DOWN)
    du, dd = np.kron(DOWN, UP), np.kron(DOWN, DOWN)
    states = dict(SINGLE_QUBIT_STATES)
    states.update(
        {
            "psi_plus": _SQ2 * (ud + du),
            "psi_minus": _SQ2 * (ud - du),
            "phi_plus": _SQ2 * (uu + dd),
            "phi_minus": _SQ2 * (uu - dd),
        }
    )
    return states
