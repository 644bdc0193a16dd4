"""
Dense complex linear algebra for small (dim <= 16) operators.

Everything here is a pure function of its inputs. Matrices are plain
``numpy.ndarray`` objects of dtype ``complex128``; the dataclasses below only
bundle decomposition results.

Conventions
-----------
* Eigenvectors are phase-fixed so that their component of largest modulus is
  real and positive.
* Left eigenvectors of a general matrix are the rows of the inverse of the
  right-vector matrix, so ``left @ right == I`` holds by construction.
* Defective eigenvalue clusters are represented by Jordan chains
  ``u1, u2, ..., uL`` with ``(V - lam) u1 = 0`` and ``(V - lam) uk = u(k-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotHermitian, NumericallyDefective

MAX_DIM = 16
DEFAULT_DEGENERACY_TOL = 1e-8
DEFAULT_RANK_TOL = 1e-8

# right-vector matrices worse than this are treated as singular
_MAX_CONDITION = 1e13


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Validate and coerce ``M`` to a square, finite complex128 array."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if A.shape[0] > MAX_DIM:
        raise DimensionMismatch(f"{name} has dimension {A.shape[0]} > {MAX_DIM}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return A


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate ``vec`` so its largest-modulus component is real positive."""
    vec = np.asarray(vec, dtype=np.complex128)
    k = int(np.argmax(np.abs(vec)))
    a = vec[k]
    if a == 0:
        return vec.copy()
    return vec * (abs(a) / a)


def hermiticity_violation(H: np.ndarray) -> float:
    return float(np.max(np.abs(H - H.conj().T)))


@dataclass(frozen=True)
class HermitianEigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T


def hermitian_eigendecompose(H, tol: float = 1e-10) -> HermitianEigenSystem:
    """
    Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    H : array_like
        Square matrix with ``max|H - H^dag| <= tol``.
    tol : float
        Allowed Hermiticity violation. The matrix is symmetrised before
        diagonalisation.

    Returns
    -------
    HermitianEigenSystem
        Ascending real eigenvalues and a unitary matrix whose columns are the
        (phase-fixed) eigenvectors.

    Raises
    ------
    NotHermitian
        If the violation exceeds ``tol``; the magnitude is attached.
    """
    A = as_matrix(H, "H")
    viol = hermiticity_violation(A)
    if viol > tol:
        raise NotHermitian(viol, tol)
    w, U = np.linalg.eigh(0.5 * (A + A.conj().T))
    U = np.column_stack([fix_phase(U[:, k]) for k in range(U.shape[1])])
    return HermitianEigenSystem(eigenvalues=w, eigenvectors=U)


def unitary_evolution(H, t: float, tol: float = 1e-10) -> np.ndarray:
    """Return ``exp(-i H t)`` built from the Hermitian eigendecomposition of ``H``."""
    if not np.isfinite(t):
        raise ValueError("evolution time must be finite")
    return evolve(hermitian_eigendecompose(H, tol), t)


def evolve(es: HermitianEigenSystem, t: float) -> np.ndarray:
    """``exp(-i H t)`` from a precomputed eigensystem of ``H``."""
    U = es.eigenvectors
    return (U * np.exp(-1j * es.eigenvalues * t)) @ U.conj().T


def _null_basis(M: np.ndarray, atol: float) -> np.ndarray:
    """Orthonormal columns spanning ``{x : |Mx| <= atol}`` (numerically)."""
    _, s, Vh = np.linalg.svd(M)
    rank = int(np.sum(s > atol))
    return Vh[rank:].conj().T


def nullspace(M, rank_tol: float = DEFAULT_RANK_TOL) -> List[np.ndarray]:
    """
    Orthonormal basis of the numerical null space of ``M``.

    Singular directions with singular value ``<= rank_tol * ||M||_2`` count as
    null. A zero matrix therefore returns a full basis and a matrix of full
    numerical rank returns an empty list.
    """
    A = as_matrix(M, "M")
    smax = np.linalg.norm(A, 2)
    basis = _null_basis(A, rank_tol * smax)
    return [fix_phase(basis[:, k]) for k in range(basis.shape[1])]


@dataclass(frozen=True)
class GeneralEigenSystem:
    """
    Right/left spectral data of a general square matrix.

    ``right_vectors`` holds one column per (generalised) eigenvector and
    ``left_vectors`` the matching rows, so that ``left_vectors @ right_vectors``
    is the identity. ``eigenvalues[k]`` is the eigenvalue attached to column
    ``k``; members of a degenerate cluster share the cluster mean.

    ``clusters`` groups column indices by eigenvalue (algebraic multiplicity
    ``M_n = len(cluster)``), ``eigenspace_dims`` gives the geometric
    multiplicity ``d_n`` of each cluster, and ``chains`` lists every Jordan chain
    of length >= 2 as column indices ordered from the true eigenvector upward.
    Ordering is by descending eigenvalue modulus.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    clusters: Tuple[Tuple[int, ...], ...]
    eigenspace_dims: Tuple[int, ...]
    chains: Tuple[Tuple[int, ...], ...] = field(default=())

    @property
    def dim(self) -> int:
        return self.right_vectors.shape[0]

    @property
    def diagonalizable(self) -> bool:
        return len(self.chains) == 0

    def right(self, k: int) -> np.ndarray:
        return self.right_vectors[:, k]

    def left(self, k: int) -> np.ndarray:
        return self.left_vectors[k, :]

    def projector(self, n: int) -> np.ndarray:
        """Spectral projector onto cluster ``n``: sum of ``|u_k><v_k|``."""
        idx = list(self.clusters[n])
        return self.right_vectors[:, idx] @ self.left_vectors[idx, :]

    def nilpotent(self, n: int, r: int = 1) -> np.ndarray:
        """``D_n^r``: the r-th power of the nilpotent part on cluster ``n``."""
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        members = set(self.clusters[n])
        for chain in self.chains:
            if chain[0] not in members:
                continue
            for k in range(r, len(chain)):
                out += np.outer(self.right_vectors[:, chain[k - r]], self.left_vectors[chain[k], :])
        return out

    def jordan_matrix(self) -> np.ndarray:
        """The Jordan form ``J`` with ``V = R J R^{-1}``."""
        J = np.diag(self.eigenvalues).astype(np.complex128)
        for chain in self.chains:
            for a, b in zip(chain[:-1], chain[1:]):
                J[a, b] = 1.0
        return J

    def reconstruct(self) -> np.ndarray:
        return self.right_vectors @ self.jordan_matrix() @ self.left_vectors


def _cluster_eigenvalues(w: np.ndarray, vecs: np.ndarray, tol: float) -> List[List[int]]:
    """
    Group eigenvalues that are numerically the same.

    Two eigenvalues join a cluster when they differ by at most ``tol * scale``.
    Pairs up to ``sqrt(tol) * scale`` apart also join when their eigenvectors are
    parallel to within ``tol``: a split Jordan block shows up exactly like that
    in floating point, with a spread of order ``eps**(1/m)``. Anything else
    within that wider distance of a split block joins it too.
    """
    n = len(w)
    scale = float(np.max(np.abs(w))) if n else 0.0
    if scale == 0.0:
        scale = 1.0
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    wide = np.sqrt(tol) * scale
    split = set()
    for i in range(n):
        for j in range(i + 1, n):
            gap = abs(w[i] - w[j])
            join = gap <= tol * scale
            if not join and gap <= wide:
                overlap = abs(np.vdot(vecs[:, i], vecs[:, j]))
                join = overlap >= 1.0 - tol
                if join:
                    split.update((i, j))
            if join:
                parent[find(i)] = find(j)
    # plain eigenvectors sharing the eigenvalue of a split block scatter just as far
    if split:
        for i in range(n):
            for j in range(n):
                if i != j and j in split and abs(w[i] - w[j]) <= wide:
                    parent[find(i)] = find(j)

    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _jordan_chains(B: np.ndarray, atol_unit: float) -> List[List[np.ndarray]]:
    """
    Jordan chains of a (numerically) nilpotent matrix ``B``.

    ``atol_unit`` is the absolute null threshold for ``B`` itself; powers use
    ``atol_unit * |B|^(j-1)`` scaled accordingly. Each returned chain is a list
    ``[u1, ..., uL]`` with ``B u1 ~ 0`` and ``B uk = u(k-1)``.
    """
    m = B.shape[0]
    bnorm = max(np.linalg.norm(B, 2), 1.0)
    kernels = [np.zeros((m, 0), dtype=np.complex128)]
    P = np.eye(m, dtype=np.complex128)
    for j in range(1, m + 1):
        P = P @ B
        kernels.append(_null_basis(P, atol_unit * bnorm ** (j - 1)))
        if kernels[j].shape[1] == m:
            break
    p = len(kernels) - 1
    if kernels[p].shape[1] != m:
        raise NumericallyDefective(
            f"cluster of multiplicity {m} is not nilpotent at the requested tolerance"
        )

    heads: List[Tuple[np.ndarray, int]] = []
    for j in range(p, 0, -1):
        Kj = kernels[j]
        covered = [kernels[j - 1]]
        for h, L in heads:
            covered.append(np.linalg.matrix_power(B, L - j) @ h[:, None])
        C = np.hstack(covered)
        if C.shape[1]:
            U, s, _ = np.linalg.svd(C, full_matrices=False)
            Qc = U[:, s > 1e-8 * max(s[0], 1e-300)]
            resid = Kj - Qc @ (Qc.conj().T @ Kj)
            n_new = Kj.shape[1] - Qc.shape[1]
        else:
            resid = Kj
            n_new = Kj.shape[1]
        if n_new < 0:
            raise NumericallyDefective("inconsistent kernel dimensions while building Jordan chains")
        if n_new == 0:
            continue
        U, _, _ = np.linalg.svd(resid, full_matrices=False)
        for k in range(n_new):
            heads.append((U[:, k], j))

    chains = []
    for h, L in heads:
        vecs = [np.linalg.matrix_power(B, L - k) @ h for k in range(1, L + 1)]
        norm = np.linalg.norm(vecs[0])
        if norm == 0:
            raise NumericallyDefective("Jordan chain collapsed to the zero vector")
        vecs = [v / norm for v in vecs]
        chains.append(vecs)
    chains.sort(key=lambda c: -len(c))
    if sum(len(c) for c in chains) != m:
        raise NumericallyDefective(
            f"Jordan chains span {sum(len(c) for c in chains)} vectors, expected {m}"
        )
    return chains


def general_eigendecompose(
    V,
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> GeneralEigenSystem:
    """
    Right and left eigenvectors of an arbitrary square matrix.

    Eigenvalues closer than ``degeneracy_tol`` (relative to the largest modulus)
    are clustered. For each cluster the invariant subspace is isolated with a
    reordered Schur form; if its eigenspace is smaller than the cluster, Jordan
    chains of generalised eigenvectors are built inside that subspace.

    Raises
    ------
    NumericallyDefective
        If the invariant subspace or the chains do not have the expected
        dimensions, or the resulting basis is singular.
    """
    A = as_matrix(V, "V")
    n = A.shape[0]
    w, vr = np.linalg.eig(A)
    groups = _cluster_eigenvalues(w, vr, degeneracy_tol)
    centers = [complex(np.mean(w[g])) for g in groups]
    scale = max(float(np.max(np.abs(w))), float(np.linalg.norm(A, 2)), 1e-300)

    order = sorted(
        range(len(groups)),
        key=lambda c: (-round(abs(centers[c]), 12), round(float(np.angle(centers[c])), 12)),
    )

    columns: List[np.ndarray] = []
    values: List[complex] = []
    clusters: List[Tuple[int, ...]] = []
    dims: List[int] = []
    chains: List[Tuple[int, ...]] = []

    for c in order:
        g, lam = groups[c], centers[c]
        start = len(columns)
        if len(g) == 1:
            v = vr[:, g[0]]
            columns.append(fix_phase(v / np.linalg.norm(v)))
            values.append(complex(w[g[0]]))
            clusters.append((start,))
            dims.append(1)
            continue

        m = len(g)

        def nearest_is_c(x, c=c):
            d = [abs(x - z) for z in centers]
            return int(np.argmin(d)) == c

        _, Z, sdim = scipy.linalg.schur(A, output="complex", sort=nearest_is_c)
        if sdim != m:
            raise NumericallyDefective(
                f"invariant subspace for eigenvalue {lam:.6g} has dimension {sdim}, expected {m}"
            )
        Q = Z[:, :m]
        B = Q.conj().T @ A @ Q - lam * np.eye(m)
        local = _jordan_chains(B, rank_tol * scale)
        d = len(local)
        for chain in local:
            full = [Q @ u for u in chain]
            head = full[0]
            k = int(np.argmax(np.abs(head)))
            rot = abs(head[k]) / head[k] / np.linalg.norm(head)
            idx = []
            for u in full:
                columns.append(u * rot)
                values.append(lam)
                idx.append(len(columns) - 1)
            if len(idx) > 1:
                chains.append(tuple(idx))
        clusters.append(tuple(range(start, len(columns))))
        dims.append(d)

    R = np.column_stack(columns)
    if R.shape != (n, n):
        raise NumericallyDefective(f"assembled {R.shape[1]} vectors for a {n}x{n} matrix")
    cond = np.linalg.cond(R)
    if not np.isfinite(cond) or cond > _MAX_CONDITION:
        raise NumericallyDefective(f"right-vector matrix is singular (condition number {cond:.2e})")
    L = np.linalg.inv(R)
    return GeneralEigenSystem(
        eigenvalues=np.asarray(values, dtype=np.complex128),
        right_vectors=R,
        left_vectors=L,
        clusters=tuple(clusters),
        eigenspace_dims=tuple(dims),
        chains=tuple(chains),
    )


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.array([[1.0 + 0j]]) if np.ndim(factors[0]) == 2 else np.array([1.0 + 0j])
    for f in factors:
        out = np.kron(out, f)
    return out
