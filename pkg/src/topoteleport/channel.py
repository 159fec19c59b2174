"""Dephasing dynamics of one topological qubit and of the two-qubit resource."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qmatrix import resource_initial_state
from .specfun import DecoherenceFactor, EnvironmentParams, alpha as decoherence

__all__ = [
    "kraus_operators",
    "evolve_single",
    "evolve_single_kraus",
    "evolve_two_qubit_kraus",
    "channel_matrix",
    "channel_state",
    "ChannelSnapshot",
]


def _check_alpha(a: float) -> float:
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"decoherence factor must lie in [0, 1], got {a}")
    return float(a)


def kraus_operators(a: float) -> tuple[np.ndarray, ...]:
    """The four single-qubit Kraus operators for decoherence factor ``a``."""
    a = _check_alpha(a)
    s = np.sqrt((1.0 - a * a) / 2.0)
    k1 = np.diag([(a - 1.0) / 2.0, (1.0 - a) / 2.0]).astype(complex)
    k2 = np.diag([(a + 1.0) / 2.0, (a + 1.0) / 2.0]).astype(complex)
    k3 = np.array([[0.0, s], [0.0, 0.0]], dtype=complex)
    k4 = np.array([[0.0, 0.0], [s, 0.0]], dtype=complex)
    return k1, k2, k3, k4


def evolve_single(rho0, a: float) -> np.ndarray:
    """Closed-form evolved qubit state.

    Populations relax as ``(1 + (2 rho_ii - 1) a^2) / 2`` and coherences are
    multiplied by ``a``.
    """
    a = _check_alpha(a)
    rho0 = np.asarray(rho0, dtype=complex)
    out = rho0 * a
    for i in range(2):
        out[i, i] = 0.5 * (1.0 + (2.0 * rho0[i, i].real - 1.0) * a * a)
    return out


def evolve_single_kraus(rho0, a: float) -> np.ndarray:
    rho0 = np.asarray(rho0, dtype=complex)
    return sum(k @ rho0 @ k.conj().T for k in kraus_operators(a))


def evolve_two_qubit_kraus(rho0, a1: float, a2: float) -> np.ndarray:
    """Apply the 16-term product channel ``sum K_i x K_j rho (K_i x K_j)^+``."""
    rho0 = np.asarray(rho0, dtype=complex)
    out = np.zeros((4, 4), dtype=complex)
    for ki in kraus_operators(a1):
        for kj in kraus_operators(a2):
            k = np.kron(ki, kj)
            out += k @ rho0 @ k.conj().T
    return out


def channel_matrix(a1: float, a2: float, vartheta: float) -> np.ndarray:
    """Evolved resource state as a function of the two decoherence factors."""
    a1 = _check_alpha(a1)
    a2 = _check_alpha(a2)
    c = np.cos(vartheta)
    p1, p2, prod = a1 * a1, a2 * a2, a1 * a1 * a2 * a2
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 0.25 * ((p1 + p2) * c + prod + 1.0)
    rho[1, 1] = 0.25 * ((p1 - p2) * c - prod + 1.0)
    rho[2, 2] = 0.25 * ((p2 - p1) * c - prod + 1.0)
    rho[3, 3] = 1.0 - (rho[0, 0] + rho[1, 1] + rho[2, 2])
    rho[0, 3] = rho[3, 0] = 0.5 * a1 * a2 * np.sin(vartheta)
    return rho


@dataclass(frozen=True)
class ChannelSnapshot:
    t: float
    alpha1: DecoherenceFactor
    alpha2: DecoherenceFactor
    vartheta: float
    rho_ch: np.ndarray = field(repr=False)

    @property
    def alpha(self) -> float:
        """Effective teleportation factor ``alpha1 * alpha2``."""
        return self.alpha1.alpha * self.alpha2.alpha

    def kraus_rho(self) -> np.ndarray:
        """Same state via the product Kraus map, for cross-checking."""
        return evolve_two_qubit_kraus(
            resource_initial_state(self.vartheta), self.alpha1.alpha, self.alpha2.alpha
        )


def channel_state(
    t: float, env1: EnvironmentParams, env2: EnvironmentParams, vartheta: float = np.pi / 2
) -> ChannelSnapshot:
    a1 = decoherence(t, env1)
    a2 = decoherence(t, env2)
    rho = channel_matrix(a1.alpha, a2.alpha, vartheta)
    rho.setflags(write=False)
    return ChannelSnapshot(t=t, alpha1=a1, alpha2=a2, vartheta=vartheta, rho_ch=rho)
