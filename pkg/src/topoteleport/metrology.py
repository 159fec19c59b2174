"""Remote magnetometry: estimating Alice's field ``B1`` from the teleported state.

The teleported state is block diagonal after reordering the basis to
(|00>, |11>, |01>, |10>): two 1x1 corner blocks and one 2x2 block.  The SLD is
assembled block by block, and the optimal measurement projects onto its
eigenvectors.  Those eigenvectors do not depend on ``alpha``, which is why the
classical Fisher information of that measurement equals the QFI.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .qmatrix import PureStateParams, ket_to_dm
from .specfun import EnvironmentParams, alpha as decoherence
from .teleport import output_state, output_state_dalpha

__all__ = [
    "EstimationReport",
    "SingularBlockError",
    "SingularPointError",
    "DegeneratePointError",
    "OUTPUT_BLOCKS",
    "find_blocks",
    "sld_block_diagonal",
    "qfi_from_sld",
    "qfi_closed_form",
    "optimal_povm",
    "optimal_povm_probs",
    "optimal_povm_dprobs",
    "fi_from_probs",
    "qfi_b1",
]

# Basis order (1, 4, 2, 3) in one-based labels.
OUTPUT_BLOCKS = ((0,), (3,), (1, 2))

DET_TOL = 1e-14
_ZERO_TOL = 1e-12
P_TOL = 1e-14
DP_TOL = 1e-10


class SingularBlockError(ArithmeticError):
    """A block is singular but the SLD formula still needs its inverse."""


class SingularPointError(ArithmeticError):
    """A zero-probability outcome carries a non-zero derivative."""


class DegeneratePointError(ArithmeticError):
    """``alpha = 1`` with a non-vanishing derivative: the QFI is unbounded."""


@dataclass(frozen=True)
class EstimationReport:
    qfi: float
    fi_optimal_povm: float
    qfi_sld: float
    sld: np.ndarray = field(repr=False)
    probs: tuple
    eta: Optional[float]
    alpha: float
    dalpha_dB1: float
    continuity: bool = False


def find_blocks(rho, drho=None, tol: float = _ZERO_TOL) -> list[tuple[int, ...]]:
    """Connected components of the non-zero pattern of ``rho`` (and ``drho``)."""
    mask = np.abs(np.asarray(rho)) > tol
    if drho is not None:
        mask |= np.abs(np.asarray(drho)) > tol
    n = mask.shape[0]
    seen = [False] * n
    blocks = []
    for start in range(n):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if not seen[j] and (mask[i, j] or mask[j, i]):
                    seen[j] = True
                    stack.append(j)
        blocks.append(tuple(sorted(comp)))
    return blocks


def _sld_1x1(r, dr):
    if abs(r) > P_TOL:
        return dr / r
    if abs(dr) <= DP_TOL:
        return 0.0
    raise SingularBlockError(f"empty 1x1 block with derivative {dr}")


def _sld_2x2(r, dr):
    mu = 0.5 * np.trace(r).real
    dmu = 0.5 * np.trace(dr).real
    if mu <= P_TOL:
        if np.max(np.abs(dr)) <= DP_TOL:
            return np.zeros((2, 2), dtype=complex)
        raise SingularBlockError("empty 2x2 block with non-zero derivative")
    dpur = 2.0 * np.trace(r @ dr).real
    xi = 2.0 * mu * dmu - dpur / 4.0
    det = np.linalg.det(r).real
    if det < DET_TOL:
        # pure block: xi vanishes together with det
        if abs(xi) > _ZERO_TOL:
            raise SingularBlockError(f"det={det:.3e} but xi={xi:.3e}")
        return (dr - dmu * np.eye(2)) / mu
    inv = np.array([[r[1, 1], -r[0, 1]], [-r[1, 0], r[0, 0]]]) / det
    return (dr + xi * inv - dmu * np.eye(2)) / mu


def sld_block_diagonal(rho, drho, blocks: Optional[Sequence[Sequence[int]]] = None) -> np.ndarray:
    """Symmetric logarithmic derivative of a block-diagonal state.

    Parameters
    ----------
    rho, drho : array_like
        State and its parameter derivative, both block diagonal up to a
        permutation of the basis.
    blocks : sequence of index tuples, optional
        The blocks (at most 2x2 each).  Inferred from the non-zero pattern
        when omitted.

    Returns
    -------
    ndarray
        ``L`` in the original basis, satisfying ``drho = (L rho + rho L) / 2``.
    """
    rho = np.asarray(rho, dtype=complex)
    drho = np.asarray(drho, dtype=complex)
    if blocks is None:
        blocks = find_blocks(rho, drho)
    L = np.zeros_like(rho)
    for blk in blocks:
        idx = np.asarray(blk)
        sub = np.ix_(idx, idx)
        if len(idx) == 1:
            L[sub] = _sld_1x1(rho[sub][0, 0].real, drho[sub][0, 0].real)
        elif len(idx) == 2:
            L[sub] = _sld_2x2(rho[sub], drho[sub])
        else:
            raise ValueError(f"block {blk} larger than 2x2")
    return L


def qfi_from_sld(drho, L) -> float:
    return float(np.real(np.trace(np.asarray(drho) @ np.asarray(L))))


def _coherence_radius(params: PureStateParams) -> float:
    # Bloch length of the normalized middle block: |(sin t sin^2 v, cos t)|
    s = np.sin(params.theta) * np.sin(params.vartheta) ** 2
    return float(np.hypot(s, np.cos(params.theta)))


def qfi_closed_form(a: float, da: float, params: PureStateParams = PureStateParams()) -> float:
    """QFI of the teleported state with respect to a parameter moving ``alpha`` at rate ``da``.

    At ``theta = vartheta = pi/2`` this is ``8 a^2 da^2 / (1 - a^4)``.
    """
    if a >= 1.0:
        if da == 0.0:
            return 0.0
        raise DegeneratePointError("alpha = 1 with non-zero derivative")
    r = _coherence_radius(params)
    a2, a4 = a * a, a ** 4
    total = 8.0 * a4 * a2 / (1.0 - a4)
    base = 0.25 * (1.0 + a4)
    for sign in (1.0, -1.0):
        lam = base + sign * 0.5 * a2 * r
        dlam = a * a2 + sign * a * r
        if lam > P_TOL:
            total += dlam * dlam / lam
    return total * da * da


def _middle_eigvecs(params: PureStateParams):
    c = np.cos(params.theta)
    w = np.exp(1j * params.phi) * np.sin(params.theta) * np.sin(params.vartheta) ** 2
    r = _coherence_radius(params)
    if r < 1e-15:
        return np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    vecs = []
    for lam in (r, -r):
        cand = (np.array([w, c + lam]), np.array([lam - c, np.conj(w)]))
        v = max(cand, key=np.linalg.norm)
        vecs.append(v / np.linalg.norm(v))
    return vecs[0], vecs[1]


def optimal_povm(params: PureStateParams = PureStateParams()) -> tuple[np.ndarray, ...]:
    """Projectors onto the SLD eigenbasis: two middle-block states, |11>, |00>."""
    v1, v2 = _middle_eigvecs(params)
    kets = []
    for v in (v1, v2):
        k = np.zeros(4, dtype=complex)
        k[1:3] = v
        kets.append(k)
    kets.append(np.array([0, 0, 0, 1], dtype=complex))
    kets.append(np.array([1, 0, 0, 0], dtype=complex))
    return tuple(ket_to_dm(k) for k in kets)


def _eta(params: PureStateParams) -> float:
    st = np.sin(params.theta)
    if abs(st) < 1e-12:
        raise SingularPointError("eta is undefined at sin(theta) = 0")
    cv2 = np.cos(params.vartheta) ** 2
    return float(np.sqrt(4.0 / st ** 2 + 2.0 * (np.cos(2 * params.vartheta) - 3.0) * cv2))


def optimal_povm_probs(a: float, params: PureStateParams = PureStateParams()):
    """Outcome probabilities of the optimal measurement.

    Returns
    -------
    (probs, eta)
        ``probs`` holds p1..p4 and ``eta`` is the angular factor shared by p1, p2.
    """
    eta = _eta(params)
    a2, a4 = a * a, a ** 4
    x = a2 * eta * np.sin(params.theta)
    probs = ((x + a4 + 1.0) / 4.0, (-x + a4 + 1.0) / 4.0, (1.0 - a4) / 4.0, (1.0 - a4) / 4.0)
    return probs, eta


def optimal_povm_dprobs(a: float, da: float, params: PureStateParams = PureStateParams()):
    """Derivatives of :func:`optimal_povm_probs` for ``d alpha = da``."""
    eta = _eta(params)
    a3 = a ** 3
    x = 0.5 * a * eta * np.sin(params.theta)
    return tuple(v * da for v in (a3 + x, a3 - x, -a3, -a3))


def fi_from_probs(probs, dprobs) -> float:
    """Classical Fisher information ``sum dp^2 / p``."""
    total = 0.0
    for p, dp in zip(probs, dprobs):
        if p < P_TOL:
            if abs(dp) > DP_TOL:
                raise SingularPointError(f"p={p:.3e} with dp={dp:.3e}")
            continue
        total += dp * dp / p
    return total


def qfi_b1(
    t: float,
    env1: EnvironmentParams,
    env2: EnvironmentParams,
    params: PureStateParams = PureStateParams(),
) -> EstimationReport:
    """Precision bounds for estimating ``env1.B`` from the teleported state at time ``t``.

    At ``alpha = 1`` (t = 0 or both fields off) the derivative of ``alpha``
    also vanishes and the QFI is reported as its continuity value 0.
    """
    f1 = decoherence(t, env1)
    f2 = decoherence(t, env2)
    a = f1.alpha * f2.alpha
    da = f2.alpha * f1.dalpha_dB
    rho = output_state(a, params)
    drho = output_state_dalpha(a, params) * da
    try:
        eta = _eta(params)
    except SingularPointError:
        eta = None
    povm = optimal_povm(params)
    probs = tuple(max(float(np.real(np.trace(rho @ P))), 0.0) for P in povm)
    if a >= 1.0:
        if da != 0.0:
            raise DegeneratePointError("alpha = 1 with non-zero derivative")
        return EstimationReport(
            qfi=0.0, fi_optimal_povm=0.0, qfi_sld=0.0, sld=np.zeros((4, 4), dtype=complex),
            probs=probs, eta=eta, alpha=a, dalpha_dB1=da, continuity=True,
        )
    dprobs = tuple(float(np.real(np.trace(drho @ P))) for P in povm)
    L = sld_block_diagonal(rho, drho, OUTPUT_BLOCKS)
    return EstimationReport(
        qfi=qfi_closed_form(a, da, params),
        fi_optimal_povm=fi_from_probs(probs, dprobs),
        qfi_sld=qfi_from_sld(drho, L),
        sld=L,
        probs=probs,
        eta=eta,
        alpha=a,
        dalpha_dB1=da,
    )
