"""Two-qubit teleportation through the dephased resource.

The generic route applies the Lee-Kim channel

    rho_out = sum_ij p_ij (s_i x s_j) rho_in (s_i x s_j),
    p_ij = Tr(B_i rho_res) Tr(B_j rho_res),

to an arbitrary input.  For the resource produced by :mod:`.channel` and the
input family of :func:`.qmatrix.input_state` the output has a closed form in
the single effective factor ``alpha = alpha1 * alpha2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import channel_state
from .qmatrix import PAULI, PureStateParams, bell_states, check_density_matrix, fidelity, input_state
from .specfun import EnvironmentParams

__all__ = [
    "TeleportResult",
    "bell_weights",
    "teleport_generic",
    "output_state",
    "output_state_dalpha",
    "teleport_closed",
    "pointwise_fidelity",
    "average_fidelity",
    "CLASSICAL_FIDELITY",
    "teleport",
]

# Best average fidelity reachable with classical communication alone.
CLASSICAL_FIDELITY = 2.0 / 3.0

_BELL = bell_states()
_PAULI2 = [np.kron(si, sj) for si in PAULI for sj in PAULI]


@dataclass(frozen=True)
class TeleportResult:
    rho_out: np.ndarray = field(repr=False)
    fidelity_pointwise: float
    f_avg: float
    alpha_eff: float


def bell_weights(rho_res) -> np.ndarray:
    """``Tr(B_i rho_res)`` for the four Bell projectors."""
    return np.array([np.real(np.trace(b @ rho_res)) for b in _BELL])


def teleport_generic(rho_in, rho_res) -> np.ndarray:
    rho_in = check_density_matrix(rho_in, dims=(4,))
    rho_res = check_density_matrix(rho_res, dims=(4,))
    q = bell_weights(rho_res)
    p = np.outer(q, q).reshape(-1)
    out = np.zeros((4, 4), dtype=complex)
    for pij, u in zip(p, _PAULI2):
        out += pij * (u @ rho_in @ u)
    return out


def output_state(a: float, params: PureStateParams = PureStateParams()) -> np.ndarray:
    """Closed-form teleported state for effective factor ``a``."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {a}")
    a2, a4 = a * a, a ** 4
    ct = np.cos(params.theta)
    coh = 0.5 * a2 * np.sin(params.theta) * np.sin(params.vartheta) ** 2
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = 0.25 * (1.0 - a4)
    rho[1, 1] = 0.25 * (1.0 + a4 - 2.0 * a2 * ct)
    rho[2, 2] = 0.25 * (1.0 + a4 + 2.0 * a2 * ct)
    rho[1, 2] = coh * np.exp(1j * params.phi)
    rho[2, 1] = coh * np.exp(-1j * params.phi)
    return rho


def output_state_dalpha(a: float, params: PureStateParams = PureStateParams()) -> np.ndarray:
    """Elementwise derivative of :func:`output_state` with respect to ``a``."""
    a3 = a ** 3
    ct = np.cos(params.theta)
    dcoh = a * np.sin(params.theta) * np.sin(params.vartheta) ** 2
    d = np.zeros((4, 4), dtype=complex)
    d[0, 0] = d[3, 3] = -a3
    d[1, 1] = a3 - a * ct
    d[2, 2] = a3 + a * ct
    d[1, 2] = dcoh * np.exp(1j * params.phi)
    d[2, 1] = dcoh * np.exp(-1j * params.phi)
    return d


def pointwise_fidelity(a: float, params: PureStateParams = PureStateParams()) -> float:
    return fidelity(output_state(a, params), input_state(params))


def average_fidelity(a: float, vartheta: float = np.pi / 2) -> float:
    """Fidelity averaged uniformly over the input Bloch sphere."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {a}")
    a2 = a * a
    return (-2.0 * a2 * np.cos(2.0 * vartheta) + 3.0 * a2 * a2 + 4.0 * a2 + 3.0) / 12.0


def teleport_closed(a: float, params: PureStateParams = PureStateParams()) -> TeleportResult:
    rho = output_state(a, params)
    return TeleportResult(
        rho_out=rho,
        fidelity_pointwise=fidelity(rho, input_state(params)),
        f_avg=average_fidelity(a, params.vartheta),
        alpha_eff=a,
    )


def teleport(
    t: float,
    env1: EnvironmentParams,
    env2: EnvironmentParams,
    params: PureStateParams = PureStateParams(),
) -> TeleportResult:
    """Teleport the ``params`` input through the resource evolved to time ``t``."""
    snap = channel_state(t, env1, env2, params.vartheta)
    return teleport_closed(snap.alpha, params)
