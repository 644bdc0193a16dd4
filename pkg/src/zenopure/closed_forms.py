"""
Analytic results for the three model systems, and the purification
condition predicates derived from them.

These functions never touch the numerical machinery in ``spectral`` so they
can serve as independent checks on it.

Models
------
single pair  X-A with frequencies (omega_x, omega_a) and coupling g
chain        X-A-B, equal frequencies omega, couplings (g_xa, g_ab), probe |down>
star         X-A and X-B with equal coupling g, probe |right> = (|up>+|down>)/sqrt2
"""

from __future__ import annotations

import cmath
import math
from typing import Dict, Tuple

import numpy as np

ANGLE_TOL = 1e-9


def _sign(x: float) -> float:
    return 1.0 if x > 0 else -1.0


def single_delta(omega_x: float, omega_a: float, g: float) -> float:
    return math.sqrt((omega_x - omega_a) ** 2 / 4 + g * g)


def _single_amplitudes(omega_x, omega_a, g, tau):
    """Phase factors shared by the single-pair expressions."""
    delta = single_delta(omega_x, omega_a, g)
    total = omega_x + omega_a
    ratio = (omega_x - omega_a) / (2 * delta)
    cd, sd = math.cos(delta * tau), math.sin(delta * tau)
    # <up down| e^{-iHt} |up down>, <down up| e^{-iHt} |down up>, cross term
    a_ud = cmath.exp(-0.5j * total * tau) * (cd - 1j * ratio * sd)
    a_du = cmath.exp(-0.5j * total * tau) * (cd + 1j * ratio * sd)
    cross = -1j * (g / delta) * cmath.exp(-0.5j * total * tau) * sd
    return delta, total, a_ud, a_du, cross


def single_projected(omega_x, omega_a, g, tau, theta, phi=0.0) -> np.ndarray:
    """Analytic ``<phi|_X exp(-iH tau) |phi>_X`` for the single pair (basis up, down)."""
    _, total, a_ud, a_du, cross = _single_amplitudes(omega_x, omega_a, g, tau)
    c2, s2 = math.cos(theta / 2) ** 2, math.sin(theta / 2) ** 2
    sc = math.sin(theta / 2) * math.cos(theta / 2)
    e_tot = cmath.exp(-1j * total * tau)
    up_up = e_tot * c2 + a_du * s2
    dn_dn = s2 + a_ud * c2
    return np.array(
        [
            [up_up, cross * cmath.exp(-1j * phi) * sc],
            [cross * cmath.exp(1j * phi) * sc, dn_dn],
        ],
        dtype=np.complex128,
    )


def single_eigenvalues(omega_x, omega_a, g, tau) -> Tuple[complex, complex]:
    """Eigenvalues (lam0, lam1) of the projected operator for the probe |up>."""
    _, total, a_ud, _, _ = _single_amplitudes(omega_x, omega_a, g, tau)
    return cmath.exp(-1j * total * tau), a_ud


def single_subdominant_modulus(omega_x, omega_a, g, tau) -> float:
    delta = single_delta(omega_x, omega_a, g)
    return math.sqrt(1 - (g / delta) ** 2 * math.sin(delta * tau) ** 2)


def closed_form_single_qubit(omega_x, omega_a, g, tau, N) -> Tuple[float, float]:
    """
    Fidelity to |up>_A and success probability after ``N`` confirmations of
    |up>_X, starting from |up><up|_X (x) identity_A / 2.
    """
    delta = single_delta(omega_x, omega_a, g)
    r = (1 - (g / delta) ** 2 * math.sin(delta * tau) ** 2) ** N
    return 1.0 / (1.0 + r), 0.5 * (1.0 + r)


def det_perpendicular(omega_x, omega_a, g, tau, theta) -> complex:
    """Analytic determinant of ``<phi_perp| exp(-iH tau) |phi>`` for the single pair."""
    delta, total, _, a_du, _ = _single_amplitudes(omega_x, omega_a, g, tau)
    bracket = abs(1 - cmath.exp(1j * total * tau) * a_du) ** 2 + (g / delta) ** 2 * math.sin(delta * tau) ** 2
    return -0.25 * cmath.exp(-1j * total * tau) * bracket * math.sin(theta) ** 2


def degenerate_clause(omega_x, omega_a, g, tau, tol: float = ANGLE_TOL) -> bool:
    """cos(delta tau) = +-1 with exp(i (omega_x+omega_a) tau / 2) of the same sign."""
    delta = single_delta(omega_x, omega_a, g)
    if abs(math.sin(delta * tau)) > tol:
        return False
    half = cmath.exp(0.5j * (omega_x + omega_a) * tau)
    return abs(1 - half * math.cos(delta * tau)) <= tol


def det_perpendicular_vanishes(omega_x, omega_a, g, tau, theta, tol: float = ANGLE_TOL) -> bool:
    return abs(math.sin(theta)) <= tol or degenerate_clause(omega_x, omega_a, g, tau, tol)


def condition_single(theta: float, delta: float, tau: float, tol: float = ANGLE_TOL) -> bool:
    """Optimal single-qubit purification: probe along the z axis and sin(delta tau) != 0."""
    return abs(math.sin(theta)) <= tol and abs(math.sin(delta * tau)) > tol


def chain_mixing(g_xa: float, g_ab: float) -> Tuple[float, float, float]:
    """Return (gbar, cos chi, sin chi) for the X-A-B chain couplings."""
    norm = math.hypot(g_xa, g_ab)
    return norm / math.sqrt(2), g_xa / norm, g_ab / norm


def init2_eigenvalues(g_xa: float, g_xb: float, omega: float, tau: float) -> Dict[str, complex]:
    """
    Eigenvalues of the chain's projected operator for the probe |down>.

    ``g_xb`` is the second bond of the chain (A-B). Keys: ``plus``, ``minus``,
    ``upup`` and ``downdown`` (always 1).
    """
    gbar, cchi, schi = chain_mixing(g_xa, g_xb)
    a = gbar * tau / math.sqrt(2)
    s, c = math.sin(a), math.cos(a)
    base = c * c - schi**2 * s * s
    root = s * cmath.sqrt(cchi**4 * s * s - 4 * schi**2 * c * c)
    ph = cmath.exp(-1j * omega * tau)
    return {
        "plus": ph * (base - root),
        "minus": ph * (base + root),
        "upup": ph * ph * (1 - 2 * cchi**2 * s * s),
        "downdown": 1.0 + 0j,
    }


def zeta_angle(g_xa: float, g_xb: float) -> float:
    """Angle zeta in (0, pi) with tan(zeta/2) = 2|sin chi| / cos^2 chi."""
    _, cchi, schi = chain_mixing(g_xa, g_xb)
    return 2.0 * math.atan2(2.0 * abs(schi), cchi * cchi)


def condition_init2(gbar: float, tau: float, tol: float = ANGLE_TOL) -> bool:
    """Two-qubit initialisation works unless sqrt(2) gbar tau is a multiple of pi."""
    if gbar <= 0:
        raise ValueError("gbar must be positive")
    return abs(math.sin(math.sqrt(2) * gbar * tau)) > tol


def init2_final_probability(omega: float, gbar: float, beta: float) -> float:
    """Final success probability of the chain started in its thermal state."""
    z = (
        1
        + (math.exp(-beta * omega) + math.exp(-2 * beta * omega)) * (1 + 2 * math.cosh(math.sqrt(2) * beta * gbar))
        + math.exp(-3 * beta * omega)
    )
    return 1.0 / z


def entangle_eigenvalues(g: float, tau: float) -> Dict[str, complex]:
    """
    Eigenvalues of the star's projected operator for the probe |right> when
    |omega| tau is a multiple of 2 pi. Keys: ``psi_minus``, ``phi_minus``,
    ``plus``, ``minus``.
    """
    a = g * tau / math.sqrt(2)
    s, c = math.sin(a), math.cos(a)
    root = _sign(g) * cmath.sqrt(1 - 9 * c * c)
    return {
        "psi_minus": 1.0 + 0j,
        "phi_minus": complex(c * c),
        "plus": 1 - 0.5 * s * (3 * s + root),
        "minus": 1 - 0.5 * s * (3 * s - root),
    }


def entangle_final_probability(g: float, beta: float) -> float:
    """Final success probability of the star at omega = 0 from its thermal state."""
    return 1.0 / (8 * math.cosh(beta * g / math.sqrt(2)) ** 2)


def condition_entangle(omega: float, tau: float, g: float, theta: float, tol: float = ANGLE_TOL) -> bool:
    """
    Bell-state extraction in the star works iff |omega| tau is a multiple of
    2 pi, the probe is off the z axis, and |g| tau / sqrt2 is not a multiple of
    pi / 2.
    """
    if g == 0:
        raise ValueError("g must be nonzero")
    phase_ok = abs(math.sin(abs(omega) * tau / 2)) <= tol
    probe_ok = abs(math.sin(theta)) > tol
    coupling_ok = abs(math.sin(math.sqrt(2) * abs(g) * tau)) > tol
    return phase_ok and probe_ok and coupling_ok
