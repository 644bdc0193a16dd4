"""
Projected evolution operators and their spectral analysis.

The projected operator ``V = <phi|_X U |phi>_X`` acts on the unmeasured
qubits. Its dominant eigenvalue decides whether repeated confirmation of the
probe state drives them into a single pure state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .linalg import (
    DEFAULT_DEGENERACY_TOL,
    GeneralEigenSystem,
    as_matrix,
    general_eigendecompose,
    unitary_evolution,
)
from .qubits import HamiltonianSpec, ProbeState, build_hamiltonian, probe_orthogonal, probe_vector

BOUND_SLACK = 1e-9


def _cross_projection(U, bra: np.ndarray, ket: np.ndarray, probe_dim: int) -> np.ndarray:
    U = as_matrix(U, "U")
    n = U.shape[0]
    if probe_dim < 1 or n % probe_dim:
        raise DimensionMismatch(f"operator dimension {n} is not divisible by probe dimension {probe_dim}")
    bra = np.asarray(bra, dtype=np.complex128).ravel()
    ket = np.asarray(ket, dtype=np.complex128).ravel()
    if bra.shape != (probe_dim,) or ket.shape != (probe_dim,):
        raise DimensionMismatch(f"probe vectors must have length {probe_dim}")
    rest = n // probe_dim
    T = U.reshape(probe_dim, rest, probe_dim, rest)
    return np.einsum("x,xayb,y->ab", bra.conj(), T, ket)


def projected_evolution(U, probe, probe_dim: int = 2) -> np.ndarray:
    """
    Partial matrix element ``<probe| U |probe>`` over the leading tensor factor.

    ``U`` acts on ``probe_dim * rest_dim`` states with the probe factor first;
    the result is a ``rest_dim x rest_dim`` operator.
    """
    vec = probe_vector(probe) if isinstance(probe, ProbeState) else np.asarray(probe, dtype=np.complex128)
    if vec.ndim != 1 or vec.shape[0] != probe_dim:
        raise DimensionMismatch(f"probe must be a vector of length {probe_dim}")
    if abs(np.linalg.norm(vec) - 1.0) > 1e-10:
        raise ValueError("probe vector must have unit norm")
    return _cross_projection(U, vec, vec, probe_dim)


def perpendicular_projection(U, probe: ProbeState) -> np.ndarray:
    """``<phi_perp| U |phi>``: the amplitude for a failed confirmation."""
    return _cross_projection(U, probe_orthogonal(probe), probe_vector(probe), 2)


def projected_operator(spec: HamiltonianSpec, probe: ProbeState, tau: float) -> np.ndarray:
    """Convenience: build H, evolve for ``tau`` and project onto the probe."""
    U = unitary_evolution(build_hamiltonian(spec), tau)
    return projected_evolution(U, probe)


@dataclass(frozen=True)
class SpectralFlags:
    unique_max: bool
    nondegenerate_max: bool
    optimal_modulus: bool
    diagonalizable: bool

    @property
    def purifies(self) -> bool:
        return self.unique_max and self.nondegenerate_max

    @property
    def all_true(self) -> bool:
        return self.unique_max and self.nondegenerate_max and self.optimal_modulus and self.diagonalizable


@dataclass(frozen=True)
class SpectralReport:
    """
    Eigenvalues of a projected operator sorted by descending modulus, with
    paired right (columns) and left (rows) vectors and the purification flags.
    ``gap_ratio`` is ``|lam1| / |lam0|``, or 1 when the maximum is not unique.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    moduli: np.ndarray
    gap_ratio: float
    flags: SpectralFlags
    tolerance: float
    system: GeneralEigenSystem

    @property
    def dominant(self) -> complex:
        return complex(self.eigenvalues[0])

    @property
    def target(self) -> np.ndarray:
        """Unit-norm right eigenvector of the dominant eigenvalue."""
        u = self.right_vectors[:, 0]
        return u / np.linalg.norm(u)

    @property
    def dominant_left(self) -> np.ndarray:
        """Left eigenvector row ``<v0|`` normalised so that ``<v0|u0> = 1``."""
        u = self.right_vectors[:, 0]
        return self.left_vectors[0, :] * np.linalg.norm(u)


def spectral_report(V, tol: float = DEFAULT_DEGENERACY_TOL) -> SpectralReport:
    system = general_eigendecompose(V, degeneracy_tol=tol)
    lam = system.eigenvalues
    mod = np.abs(lam)
    n = len(lam)
    if n == 1:
        unique = True
    else:
        unique = bool(mod[0] - mod[1] > tol)
    nondegenerate = len(system.clusters[0]) == 1
    optimal = bool(abs(mod[0] - 1.0) <= tol)
    if n == 1:
        gap = 0.0
    elif unique:
        gap = float(mod[1] / mod[0])
    else:
        gap = 1.0
    flags = SpectralFlags(
        unique_max=unique,
        nondegenerate_max=nondegenerate,
        optimal_modulus=optimal,
        diagonalizable=system.diagonalizable,
    )
    return SpectralReport(
        eigenvalues=lam,
        right_vectors=system.right_vectors,
        left_vectors=system.left_vectors,
        moduli=mod,
        gap_ratio=gap,
        flags=flags,
        tolerance=tol,
        system=system,
    )


def power_via_spectrum(report: SpectralReport, N: int) -> np.ndarray:
    """
    ``V**N`` rebuilt from spectral data.

    Each cluster contributes ``lam**N P + sum_r C(N, r) lam**(N-r) D**r`` where
    ``P`` is its spectral projector and ``D`` its nilpotent part; the sum over
    ``r`` is empty for diagonalizable clusters.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    sysm = report.system
    out = np.zeros((sysm.dim, sysm.dim), dtype=np.complex128)
    for n, members in enumerate(sysm.clusters):
        lam = complex(sysm.eigenvalues[members[0]])
        out += lam**N * sysm.projector(n)
        longest = max((len(c) for c in sysm.chains if c[0] in members), default=1)
        for r in range(1, min(N, longest - 1) + 1):
            out += math.comb(N, r) * lam ** (N - r) * sysm.nilpotent(n, r)
    return out


def verify_bound(report: SpectralReport) -> bool:
    """True iff every eigenvalue modulus is at most 1 (up to 1e-9)."""
    return bool(np.all(report.moduli <= 1.0 + BOUND_SLACK))
