"""Small dense-matrix helpers for one- and two-qubit states.

States are plain ``numpy`` complex arrays of shape (2, 2) or (4, 4) in the
computational basis, ordered |00>, |01>, |10>, |11> for two qubits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PAULI",
    "PureStateParams",
    "NotHermitianError",
    "InvalidStateError",
    "check_density_matrix",
    "is_density_matrix",
    "ket_to_dm",
    "input_state",
    "resource_initial_state",
    "bell_states",
    "eig_hermitian",
    "fidelity",
    "trace_distance",
    "purity",
]

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class NotHermitianError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


@dataclass(frozen=True)
class PureStateParams:
    """Angles of the teleported input and of the resource preparation.

    ``theta`` and ``phi`` fix the input ``cos(theta/2)|10> + e^{i phi} sin(theta/2)|01>``;
    ``vartheta`` fixes the resource ``cos(vartheta/2)|00> + sin(vartheta/2)|11>``.
    The default is the maximally entangled choice for both.
    """

    theta: float = np.pi / 2
    phi: float = 0.0
    vartheta: float = np.pi / 2

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise ValueError(f"phi must lie in [0, 2 pi), got {self.phi}")
        if not 0.0 <= self.vartheta <= np.pi:
            raise ValueError(f"vartheta must lie in [0, pi], got {self.vartheta}")


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def check_density_matrix(rho, dims=(2, 4)) -> np.ndarray:
    """Return ``rho`` as a complex array or raise InvalidStateError."""
    rho = _as_square(rho)
    if rho.shape[0] not in dims:
        raise InvalidStateError(f"dimension {rho.shape[0]} not in {dims}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TRACE_TOL:
        raise InvalidStateError(f"trace {np.trace(rho).real} != 1")
    if np.linalg.eigvalsh(rho)[0] < -PSD_TOL:
        raise InvalidStateError("density matrix has a negative eigenvalue")
    return rho


def is_density_matrix(rho, dims=(2, 4)) -> bool:
    try:
        check_density_matrix(rho, dims)
    except (InvalidStateError, ValueError):
        return False
    return True


def ket_to_dm(ket) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex).reshape(-1)
    return np.outer(ket, ket.conj())


def input_state(params: PureStateParams) -> np.ndarray:
    """Projector onto the two-qubit input ``cos(t/2)|10> + e^{i p} sin(t/2)|01>``."""
    ket = np.zeros(4, dtype=complex)
    ket[2] = np.cos(params.theta / 2)
    ket[1] = np.exp(1j * params.phi) * np.sin(params.theta / 2)
    return ket_to_dm(ket)


def resource_initial_state(vartheta: float) -> np.ndarray:
    """Projector onto ``cos(v/2)|00> + sin(v/2)|11>``."""
    ket = np.zeros(4, dtype=complex)
    ket[0] = np.cos(vartheta / 2)
    ket[3] = np.sin(vartheta / 2)
    return ket_to_dm(ket)


def bell_states() -> tuple[np.ndarray, ...]:
    """Bell projectors ``B_i = (1 x s_i) B_0 (1 x s_i)`` with ``B_0 = |Phi+><Phi+|``."""
    b0 = ket_to_dm(np.array([1, 0, 0, 1]) / np.sqrt(2))
    out = [b0]
    for s in PAULI[1:]:
        u = np.kron(PAULI[0], s)
        out.append(u @ b0 @ u)
    return tuple(out)


def eig_hermitian(m, tol: float = HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    (eigenvalues, eigenvectors)
        Real eigenvalues in descending order and the matching orthonormal
        eigenvectors as columns.
    """
    m = _as_square(m)
    if np.max(np.abs(m - m.conj().T)) > tol * max(1.0, np.max(np.abs(m))):
        raise NotHermitianError("matrix is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w[::-1], v[:, ::-1]


def purity(rho) -> float:
    rho = _as_square(rho)
    return float(np.real(np.trace(rho @ rho)))


def fidelity(rho, pure, tol: float = 1e-10) -> float:
    """Fidelity ``<psi|rho|psi>`` against a rank-one projector ``pure``."""
    rho = _as_square(rho)
    pure = _as_square(pure)
    if rho.shape != pure.shape:
        raise ValueError(f"shape mismatch {rho.shape} vs {pure.shape}")
    if abs(purity(pure) - 1.0) > tol or abs(np.trace(pure) - 1.0) > tol:
        raise InvalidStateError("second argument is not a rank-one projector")
    f = float(np.real(np.trace(rho @ pure)))
    return min(max(f, 0.0), 1.0)


def trace_distance(a, b) -> float:
    """``1/2 sum |eig(a - b)|``."""
    a = _as_square(a)
    b = _as_square(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    w, _ = eig_hermitian(a - b)
    return float(0.5 * np.sum(np.abs(w)))
