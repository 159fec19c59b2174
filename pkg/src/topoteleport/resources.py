"""Quantum-resource measures and non-Markovianity witnesses."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import channel_state, evolve_single, evolve_single_kraus
from .qmatrix import PAULI, PureStateParams, eig_hermitian, ket_to_dm, trace_distance
from .specfun import EnvironmentParams, alpha as decoherence
from .teleport import output_state

__all__ = [
    "ResourceReport",
    "NotXStateError",
    "concurrence_x",
    "concurrence_wootters",
    "coherence_l1",
    "binary_entropy",
    "discord_x",
    "witness_state",
    "hss_from_definition",
    "hss_witness",
    "blp_witness",
    "rate_sign",
    "resource_report",
    "local_maxima",
    "RATE_STEP",
    "RATE_TOL",
]

X_TOL = 1e-12
RATE_STEP = 1e-4
RATE_TOL = 1e-10
_X_FORBIDDEN = [(i, j) for i in range(4) for j in range(4) if i != j and i + j != 3]


class NotXStateError(ValueError):
    pass


@dataclass(frozen=True)
class ResourceReport:
    t: float
    concurrence: float
    coherence_l1: float
    discord: float
    hss: float
    trace_dist: float
    blp_rate_sign: int
    hss_rate_sign: int


def _check_x(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise NotXStateError(f"expected a 4x4 state, got {rho.shape}")
    bad = max(abs(rho[i, j]) for i, j in _X_FORBIDDEN)
    if bad > X_TOL:
        raise NotXStateError(f"entry of size {bad:.3e} outside the X pattern")
    return rho


def concurrence_x(rho) -> float:
    """Concurrence of an X state from its diagonal and anti-diagonal."""
    rho = _check_x(rho)
    d = rho.diagonal().real.clip(0.0)
    c1 = abs(rho[0, 3]) - math.sqrt(d[1] * d[2])
    c2 = abs(rho[1, 2]) - math.sqrt(d[0] * d[3])
    return 2.0 * max(0.0, c1, c2)


def concurrence_wootters(rho) -> float:
    """Wootters concurrence of an arbitrary two-qubit state."""
    rho = np.asarray(rho, dtype=complex)
    yy = np.kron(PAULI[2], PAULI[2])
    tilde = yy @ rho.conj() @ yy
    ev = np.linalg.eigvals(rho @ tilde)
    lam = np.sort(np.sqrt(np.abs(ev.real)))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def coherence_l1(rho) -> float:
    """Sum of off-diagonal magnitudes in the computational basis."""
    a = np.abs(np.asarray(rho))
    return float(a.sum() - np.trace(a))


def _xlog2x(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


def binary_entropy(x: float) -> float:
    x = min(max(x, 0.0), 1.0)
    return -_xlog2x(x) - _xlog2x(1.0 - x)


def discord_x(rho) -> float:
    """Quantum discord (measurement on the second qubit) of an X state, in bits."""
    rho = _check_x(rho)
    d = rho.diagonal().real.clip(0.0, 1.0)
    lam = np.clip(eig_hermitian(rho)[0], 0.0, 1.0)
    h_b = binary_entropy(d[0] + d[2])
    neg_s = sum(_xlog2x(x) for x in lam)
    zc = 1.0 - 2.0 * (d[2] + d[3])
    corr = abs(rho[0, 3]) + abs(rho[1, 2])
    d1 = binary_entropy((1.0 + math.sqrt(zc * zc + 4.0 * corr * corr)) / 2.0)
    d2 = -sum(_xlog2x(x) for x in d) - h_b
    q1 = h_b + neg_s + d1
    q2 = h_b + neg_s + d2
    return max(0.0, min(q1, q2))


def witness_state(phi: float = 0.0) -> np.ndarray:
    """``(e^{i phi}|0> + |1>) / sqrt(2)`` as a projector."""
    return ket_to_dm(np.array([np.exp(1j * phi), 1.0]) / math.sqrt(2.0))


def hss_from_definition(a: float, phi: float = 0.0) -> float:
    """Hilbert-Schmidt speed ``sqrt(Tr[(d rho / d phi)^2] / 2)`` of the evolved witness state.

    The channel is linear, so the phase derivative of the evolved state is the
    evolved phase derivative of the initial state.
    """
    d0 = 0.5 * np.array([[0.0, 1j * np.exp(1j * phi)], [-1j * np.exp(-1j * phi), 0.0]])
    d = evolve_single_kraus(d0, a)
    return math.sqrt(0.5 * np.real(np.trace(d @ d)))


def _central_rate(f, t: float, h: float = RATE_STEP) -> float:
    # alpha depends on t^2, so f(-s) = f(s) extends the stencil below t = 0
    return (f(t + h) - f(abs(t - h))) / (2.0 * h)


def rate_sign(rate: float, tol: float = RATE_TOL) -> int:
    if abs(rate) <= tol:
        return 0
    return 1 if rate > 0 else -1


def hss_witness(t: float, env: EnvironmentParams, phi: float = 0.0):
    """HSS of the evolved witness state and the sign of its time derivative."""
    hss = hss_from_definition(decoherence(t, env).alpha, phi)
    rate = _central_rate(lambda s: hss_from_definition(decoherence(s, env).alpha, phi), t)
    return hss, rate_sign(rate)


def _blp_distance(t: float, env: EnvironmentParams) -> float:
    a = decoherence(t, env).alpha
    zero = np.diag([1.0, 0.0]).astype(complex)
    one = np.diag([0.0, 1.0]).astype(complex)
    return trace_distance(evolve_single(zero, a), evolve_single(one, a))


def blp_witness(t: float, env: EnvironmentParams):
    """Trace distance of the evolved pair {|0>, |1>} and the sign of its rate."""
    return _blp_distance(t, env), rate_sign(_central_rate(lambda s: _blp_distance(s, env), t))


def resource_report(
    t: float,
    env1: EnvironmentParams,
    env2: EnvironmentParams,
    params: PureStateParams = PureStateParams(),
    target: str = "output",
    witness_qubit: int = 1,
) -> ResourceReport:
    """Resources of the resource state (``target="channel"``) or the teleported state.

    The witnesses track a single qubit of the resource, chosen by ``witness_qubit``.
    """
    snap = channel_state(t, env1, env2, params.vartheta)
    if target == "channel":
        rho = snap.rho_ch
    elif target == "output":
        rho = output_state(snap.alpha, params)
    else:
        raise ValueError(f"unknown target {target!r}")
    env = {1: env1, 2: env2}[witness_qubit]
    hss, hss_sign = hss_witness(t, env)
    dist, blp_sign = blp_witness(t, env)
    return ResourceReport(
        t=t,
        concurrence=concurrence_x(rho),
        coherence_l1=coherence_l1(rho),
        discord=discord_x(rho),
        hss=hss,
        trace_dist=dist,
        blp_rate_sign=blp_sign,
        hss_rate_sign=hss_sign,
    )


def local_maxima(ts, ys, floor: float = 1e-12) -> np.ndarray:
    """Times of interior local maxima of a sampled curve, ignoring values at or below ``floor``.

    Flat tops are reported at their midpoint.
    """
    ts = np.asarray(ts, dtype=float)
    ys = np.asarray(ys, dtype=float)
    out = []
    i = 1
    n = len(ys)
    while i < n - 1:
        if ys[i] > ys[i - 1] and ys[i] > floor:
            j = i
            while j + 1 < n and ys[j + 1] == ys[i]:
                j += 1
            if j + 1 < n and ys[j + 1] < ys[i]:
                out.append(0.5 * (ts[i] + ts[j]))
            i = j + 1
        else:
            i += 1
    return np.asarray(out)
