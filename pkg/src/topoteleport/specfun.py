"""Special functions and the pure-dephasing decoherence factor.

The environment of each topological qubit enters the dynamics only through
the scalar decoherence factor

    alpha(t) = exp(-2 B^2 |beta| I_Q(t)),
    beta = -4 pi / Gamma(Q + 1) * (1 / gamma0)^(Q + 1),

where ``I_Q`` is a confluent (Q != 1) or generalized (Q == 1) hypergeometric
function of ``-(t * gamma0)^2 / 4``.  Everything here is plain float
arithmetic; the series are summed with Neumaier compensation.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

__all__ = [
    "EnvironmentParams",
    "DecoherenceFactor",
    "PoleError",
    "SeriesConvergenceError",
    "gamma_fn",
    "hyp1f1",
    "hyp2f2_11_3half2",
    "beta_coefficient",
    "i_q",
    "alpha",
    "Q_ONE_TOL",
]

MAX_TERMS = 10_000
SERIES_RTOL = 1e-16
# |Q - 1| below this routes I_Q to the Q = 1 formula.
Q_ONE_TOL = 1e-9
_SMALL_ARG = 2.0


class PoleError(ValueError):
    """Raised when a Gamma-type parameter sits on a pole."""


class SeriesConvergenceError(ArithmeticError):
    """Raised when a power series misses its tolerance within the term cap."""


@dataclass(frozen=True)
class EnvironmentParams:
    """Bath and control settings of one qubit.

    Attributes
    ----------
    Q : float
        Ohmicity exponent of the spectral density (``Q >= 0``).
    gamma0 : float
        Cutoff frequency (``> 0``), inverse time units.
    B : float
        Magnetic-field strength (``>= 0``).
    """

    Q: float = 1.0
    gamma0: float = 1.0
    B: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.Q) and self.Q >= 0):
            raise ValueError(f"Ohmicity Q must be finite and >= 0, got {self.Q}")
        if not (math.isfinite(self.gamma0) and self.gamma0 > 0):
            raise ValueError(f"cutoff gamma0 must be finite and > 0, got {self.gamma0}")
        if not (math.isfinite(self.B) and self.B >= 0):
            raise ValueError(f"field B must be finite and >= 0, got {self.B}")


@dataclass(frozen=True)
class DecoherenceFactor:
    alpha: float
    dalpha_dB: float


def _is_nonpositive_int(z: float) -> bool:
    return z <= 0 and z == math.floor(z)


def _sum_series(first, ratio, label):
    """Sum ``first + t1 + t2 + ...`` where ``t_{k+1} = t_k * ratio(k)``.

    Converged once three consecutive terms fall below ``SERIES_RTOL`` of the
    running sum while the terms are shrinking.
    """
    total = first
    comp = 0.0
    term = first
    quiet = 0
    for k in range(MAX_TERMS):
        r = ratio(k)
        term *= r
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        s = total + comp
        if abs(term) <= SERIES_RTOL * abs(s) and abs(r) < 1.0:
            quiet += 1
            if quiet >= 3:
                return s
        elif term == 0.0:
            # terminating (polynomial) series
            return s
        else:
            quiet = 0
    raise SeriesConvergenceError(f"{label}: no convergence within {MAX_TERMS} terms")


def gamma_fn(z: float) -> float:
    """Gamma function for real ``z``; poles at 0, -1, -2, ... raise PoleError."""
    if _is_nonpositive_int(z):
        raise PoleError(f"Gamma has a pole at z={z}")
    return math.gamma(z)


def _hyp1f1_direct(a, b, x):
    return _sum_series(1.0, lambda k: (a + k) / (b + k) * x / (k + 1), "1F1")


def hyp1f1(a: float, b: float, x: float) -> float:
    """Kummer's confluent hypergeometric function 1F1(a; b; x).

    Negative arguments go through Kummer's transformation
    ``1F1(a; b; x) = e^x 1F1(b - a; b; -x)`` so that the summed series has
    (eventually) same-signed terms.
    """
    if _is_nonpositive_int(b):
        raise PoleError(f"1F1 parameter b={b} is a non-positive integer")
    if x == 0.0 or a == 0.0:
        return 1.0
    if a == b:
        return math.exp(x)
    if x < 0.0 and not _is_nonpositive_int(a):
        return _kummer_negative(a, b, -x)
    return _hyp1f1_direct(a, b, x)


_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)


def _kummer_negative(a, b, y):
    """``1F1(a; b; -y) = e^{-y} 1F1(b - a; b; y)`` for ``y > 0``.

    The terms of the transformed series reach ``~e^y`` before the prefactor
    brings them back down, so they are carried with a separate log-scale to
    stay clear of overflow for large ``y``.
    """
    c = b - a
    term, shift = 1.0, -y
    parts = [math.exp(shift)]
    running = parts[0]
    quiet = 0
    for k in range(MAX_TERMS):
        r = (c + k) / (b + k) * y / (k + 1)
        if r == 0.0:
            return math.fsum(parts)
        term *= r
        if abs(term) > _RESCALE:
            term /= _RESCALE
            shift += _LOG_RESCALE
        scaled = term * math.exp(shift) if shift < 700.0 else math.inf
        parts.append(scaled)
        running += scaled
        if abs(r) < 1.0 and abs(scaled) <= SERIES_RTOL * abs(running):
            quiet += 1
            if quiet >= 3:
                return math.fsum(parts)
        else:
            quiet = 0
    raise SeriesConvergenceError(f"1F1: no convergence within {MAX_TERMS} terms")


def _hyp1f1_minus_one(a, b, x):
    """``1F1(a; b; x) - 1`` without the cancellation near ``x = 0``."""
    if abs(x) <= _SMALL_ARG:
        first = a / b * x
        if first == 0.0:
            return 0.0
        return _sum_series(first, lambda k: (a + k + 1) / (b + k + 1) * x / (k + 2), "1F1-1")
    return hyp1f1(a, b, x) - 1.0


def hyp2f2_11_3half2(x: float) -> float:
    """2F2(1, 1; 3/2, 2; x).

    For ``x >= 0`` the power series has positive terms.  For ``x = -y < 0``
    the alternating series cancels catastrophically, so we use

        y * 2F2(1, 1; 3/2, 2; -y) = sum_j Pois(j; y) * H_j,
        H_j = sum_{k<j} 1 / (2k + 1),

    which follows from integrating ``1F1(1; 3/2; -s) = e^{-s} 1F1(1/2; 3/2; s)``
    term by term.  Every summand is positive.
    """
    if x == 0.0:
        return 1.0
    if x > 0.0:
        return _sum_series(1.0, lambda k: (k + 1) / ((k + 1.5) * (k + 2)) * x, "2F2")
    y = -x
    if y <= _SMALL_ARG:
        return _sum_series(1.0, lambda k: (k + 1) / ((k + 1.5) * (k + 2)) * x, "2F2")
    # Poisson weights are negligible (< e^-72 of the peak) beyond this index.
    n_max = int(math.ceil(y + 12.0 * math.sqrt(y) + 40.0))
    if n_max > MAX_TERMS:
        raise SeriesConvergenceError(f"2F2: argument {x} needs more than {MAX_TERMS} terms")
    log_y = math.log(y)
    terms = []
    harmonic = 0.0
    for j in range(1, n_max + 1):
        harmonic += 1.0 / (2 * j - 1)
        terms.append(math.exp(-y + j * log_y - math.lgamma(j + 1)) * harmonic)
    return math.fsum(terms) / y


def beta_coefficient(env: EnvironmentParams) -> float:
    """``beta = -4 pi / Gamma(Q+1) * gamma0^-(Q+1)`` (always negative)."""
    return -4.0 * math.pi / gamma_fn(env.Q + 1.0) * env.gamma0 ** (-(env.Q + 1.0))


def i_q(t: float, env: EnvironmentParams) -> float:
    """The dephasing integral ``I_Q(t)``; ``I_Q(0) = 0``.

    ``|Q - 1| < Q_ONE_TOL`` uses the dedicated Q = 1 expression, otherwise the
    1F1 form.  Note the two printed expressions are *not* continuous at Q = 1:
    the Q = 1 form is one half of the Q -> 1 limit of the general form.
    """
    if not t >= 0:
        raise ValueError(f"time must be >= 0, got {t}")
    if t == 0.0:
        return 0.0
    g = env.gamma0
    x = (t * g) ** 2 / 4.0
    if abs(env.Q - 1.0) < Q_ONE_TOL:
        value = 0.5 * (t * g) ** 2 * hyp2f2_11_3half2(-x)
    else:
        a = (env.Q - 1.0) / 2.0
        value = -2.0 * g ** (env.Q - 1.0) * gamma_fn(a) * _hyp1f1_minus_one(a, 0.5, -x)
    if value < 0.0:
        warnings.warn(
            f"I_Q(t={t}) = {value} < 0 for {env}; alpha will exceed 1",
            RuntimeWarning,
            stacklevel=2,
        )
    return value


def alpha(t: float, env: EnvironmentParams) -> DecoherenceFactor:
    """Decoherence factor and its analytic derivative with respect to ``B``."""
    if env.B == 0.0:
        if not t >= 0:
            raise ValueError(f"time must be >= 0, got {t}")
        # only B^2 I_Q enters, and the field is off
        return DecoherenceFactor(alpha=1.0, dalpha_dB=0.0)
    exponent = 2.0 * abs(beta_coefficient(env)) * i_q(t, env)
    a = math.exp(-env.B ** 2 * exponent)
    return DecoherenceFactor(alpha=a, dalpha_dB=-2.0 * env.B * exponent * a)
