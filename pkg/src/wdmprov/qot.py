"""BER / GSNR / Q-factor conversions and reciprocal-SNR composition.

All SNR-like quantities (GSNR, transceiver back-to-back SNR, Q-squared) are
expressed in dB, defined as ``10*log10`` of the linear ratio.  ``-inf`` dB is
the zero-SNR limit and ``+inf`` dB the noise-free limit; both are valid
inputs and outputs wherever that makes sense.

The pre-FEC bit error rate of a coherent receiver is modelled as a strictly
decreasing function of the linear GSNR for each modulation format::

    BER = c * erfc(sqrt(GSNR_linear / d))

with ``(c, d) = (1/2, 2)`` for DP-QPSK and ``(3/8, 10)`` for DP-16QAM.  The
Q-squared factor is the SNR-like metric in one-to-one correspondence with
BER through the QPSK-shaped relation ``BER = 1/2 erfc(sqrt(Q2/2))``; for
QPSK, Q-squared and GSNR therefore coincide.

``erfc`` and its inverse are implemented here (power series plus continued
fraction, and a rational approximation refined by Newton steps) so that the
accuracy of the whole estimation chain is under our control; the test suite
pins them against a high-precision oracle.
"""

from __future__ import annotations

import enum
import math
from typing import Iterable

__all__ = [
    "BerOutOfRangeError",
    "EmptyListError",
    "ModulationFormat",
    "NonPositiveRemainderError",
    "ber_from_gsnr",
    "combine_inverse",
    "db_to_linear",
    "erfc",
    "erfcinv",
    "gsnr_from_ber",
    "linear_to_db",
    "q_squared_from_ber",
    "remove_contribution",
]

_SQRT_PI = math.sqrt(math.pi)

# Solver bracket for BER inversion, in linear GSNR.
_GSNR_LIN_LO = 1e-6
_GSNR_LIN_HI = 1e6


class QotError(ValueError):
    """Base class for conversion/composition domain errors."""


class BerOutOfRangeError(QotError):
    """BER is outside the invertible range of the modulation format."""


class NonPositiveRemainderError(QotError):
    """Removing a noise contribution left nothing (component <= total)."""


class EmptyListError(QotError):
    """Reciprocal composition needs at least one component."""


def db_to_linear(value_db: float) -> float:
    """Convert dB to a linear power ratio (10*log10 convention)."""
    if value_db == -math.inf:
        return 0.0
    if value_db == math.inf:
        return math.inf
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    """Convert a linear power ratio to dB; 0 maps to -inf."""
    if value < 0.0:
        raise ValueError(f"negative linear ratio: {value}")
    if value == 0.0:
        return -math.inf
    if value == math.inf:
        return math.inf
    return 10.0 * math.log10(value)


# ---------------------------------------------------------------------------
# erfc and its inverse
# ---------------------------------------------------------------------------

def _erf_series(x: float) -> float:
    # Maclaurin series; used for |x| < 1.5 where it converges in ~30 terms.
    term = x
    total = x
    x2 = x * x
    n = 0
    while True:
        n += 1
        term *= -x2 / n
        delta = term / (2 * n + 1)
        total += delta
        if abs(delta) <= 1e-18 * abs(total):
            return 2.0 / _SQRT_PI * total


def _erfc_continued_fraction(x: float) -> float:
    # erfc(x) = Gamma(1/2, x^2)/sqrt(pi), evaluated with the modified Lentz
    # continued fraction for the upper incomplete gamma function.  Converges
    # rapidly for x^2 > 1.5, which is where we use it.
    a = 0.5
    z = x * x
    tiny = 1e-300
    b = z + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= 1e-17:
            break
    return math.exp(-z) * x * h / _SQRT_PI


def erfc(x: float) -> float:
    """Complementary error function, accurate to ~1e-14 relative."""
    if x < 0.0:
        return 2.0 - erfc(-x)
    if x < 1.5:
        return 1.0 - _erf_series(x)
    if x > 27.0:
        return 0.0  # below double-precision underflow threshold
    return _erfc_continued_fraction(x)


# Coefficients of Acklam's rational approximation to the inverse normal CDF,
# used as the starting point for Newton refinement in erfcinv.
_ACKLAM_A = (-3.969683028665376e+01, 2.209460984245205e+02,
             -2.759285104469687e+02, 1.383577518672690e+02,
             -3.066479806614716e+01, 2.506628277459239e+00)
_ACKLAM_B = (-5.447609879822406e+01, 1.615858368580409e+02,
             -1.556989798598866e+02, 6.680131188771972e+01,
             -1.328068155288572e+01)
_ACKLAM_C = (-7.784894002430293e-03, -3.223964580411365e-01,
             -2.400758277161838e+00, -2.549732539343734e+00,
             4.374664141464968e+00, 2.938163982698783e+00)
_ACKLAM_D = (7.784695709041462e-03, 3.224671290700398e-01,
             2.445134137142996e+00, 3.754408661907416e+00)


def _norm_ppf_approx(p: float) -> float:
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q
                 + c[5])
                / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0))
    if p <= 1.0 - p_low:
        q = p - 0.5
        r = q * q
        return ((((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r
                 + a[5]) * q
                / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r
                   + 1.0))
    q = math.sqrt(-2.0 * math.log(1.0 - p))
    return -((((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q
              + c[5])
             / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0))


def erfcinv(p: float) -> float:
    """Inverse of :func:`erfc` on (0, 2)."""
    if not 0.0 < p < 2.0:
        raise ValueError(f"erfcinv domain is (0, 2), got {p}")
    if p == 1.0:
        return 0.0
    x = -_norm_ppf_approx(p / 2.0) / math.sqrt(2.0)
    # Newton refinement on erfc(x) - p; quadratic convergence from the
    # rational starting point reaches double precision in <= 4 steps.
    for _ in range(4):
        err = erfc(x) - p
        if err == 0.0:
            break
        x += err * _SQRT_PI / 2.0 * math.exp(x * x)
    return x


# ---------------------------------------------------------------------------
# Modulation formats
# ---------------------------------------------------------------------------

class ModulationFormat(enum.Enum):
    """Modulation formats with their BER-vs-GSNR mapping parameters.

    Each member carries ``(coefficient, divisor)`` of the mapping
    ``BER = coefficient * erfc(sqrt(gsnr_linear / divisor))``.
    """

    QPSK = (0.5, 2.0)
    QAM16 = (0.375, 10.0)

    @property
    def coefficient(self) -> float:
        return self.value[0]

    @property
    def divisor(self) -> float:
        return self.value[1]

    @property
    def zero_snr_ber(self) -> float:
        """BER in the zero-SNR limit (the format's maximum BER)."""
        return self.coefficient

    @classmethod
    def from_name(cls, name: str) -> "ModulationFormat":
        key = name.strip().upper().replace("-", "").replace("_", "")
        aliases = {"QPSK": cls.QPSK, "DPQPSK": cls.QPSK,
                   "QAM16": cls.QAM16, "16QAM": cls.QAM16,
                   "DP16QAM": cls.QAM16}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown modulation format: {name!r}") from None


def _ber_linear(gsnr_linear: float, fmt: ModulationFormat) -> float:
    return fmt.coefficient * erfc(math.sqrt(gsnr_linear / fmt.divisor))


def ber_from_gsnr(gsnr_db: float, fmt: ModulationFormat) -> float:
    """Pre-FEC BER of `fmt` at the given GSNR (dB).

    Strictly decreasing in GSNR; the zero-SNR limit (-inf dB) gives the
    format's maximum BER and +inf dB gives 0.
    """
    g = db_to_linear(gsnr_db)
    if g == math.inf:
        return 0.0
    return _ber_linear(g, fmt)


def gsnr_from_ber(ber: float, fmt: ModulationFormat) -> float:
    """GSNR (dB) at which `fmt` produces the given pre-FEC BER.

    Inverts :func:`ber_from_gsnr` by bisection on the linear GSNR within
    ``[1e-6, 1e6]`` followed by Newton polishing; the result reproduces the
    input BER to better than 1e-9 relative.

    Raises :class:`BerOutOfRangeError` for ``ber <= 0`` (GSNR unbounded) or
    ``ber`` above the format's zero-SNR BER.  At exactly the zero-SNR BER
    the -inf dB sentinel is returned.
    """
    if ber <= 0.0:
        raise BerOutOfRangeError(f"BER must be positive, got {ber}")
    if ber > fmt.zero_snr_ber:
        raise BerOutOfRangeError(
            f"BER {ber} exceeds {fmt.name} zero-SNR BER {fmt.zero_snr_ber}")
    if ber == fmt.zero_snr_ber:
        return -math.inf

    lo, hi = _GSNR_LIN_LO, _GSNR_LIN_HI
    if _ber_linear(lo, fmt) <= ber:
        # Solution below the solver floor: effectively zero SNR.
        return -math.inf
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _ber_linear(mid, fmt) > ber:
            lo = mid
        else:
            hi = mid
    g = 0.5 * (lo + hi)
    # Newton polish: dBER/dg = -c * exp(-g/d) / (sqrt(pi) * sqrt(g*d))
    for _ in range(20):
        err = _ber_linear(g, fmt) - ber
        if abs(err) <= 1e-12 * ber:
            break
        slope = (-fmt.coefficient * math.exp(-g / fmt.divisor)
                 / (_SQRT_PI * math.sqrt(g * fmt.divisor)))
        step = err / slope
        g_next = g - step
        if g_next <= 0.0:
            g_next = 0.5 * g
        g = g_next
    return linear_to_db(g)


def q_squared_from_ber(ber: float) -> float:
    """Q-squared factor (dB) equivalent to the given pre-FEC BER.

    Defined through ``BER = 1/2 erfc(sqrt(Q2/2))``, so for QPSK this equals
    the GSNR exactly.
    """
    if ber <= 0.0:
        raise BerOutOfRangeError(f"BER must be positive, got {ber}")
    if ber > 0.5:
        raise BerOutOfRangeError(f"BER must be <= 0.5, got {ber}")
    if ber == 0.5:
        return -math.inf
    q2_linear = 2.0 * erfcinv(2.0 * ber) ** 2
    return linear_to_db(q2_linear)


# ---------------------------------------------------------------------------
# Reciprocal-SNR algebra
# ---------------------------------------------------------------------------

def combine_inverse(components_db: Iterable[float]) -> float:
    """Compose SNR contributions (dB) by summing linear reciprocals.

    The result is at most the minimum component; +inf components contribute
    nothing, any -inf component forces -inf.
    """
    total = 0.0
    n = 0
    for c in components_db:
        n += 1
        lin = db_to_linear(c)
        if lin == 0.0:
            return -math.inf
        if lin != math.inf:
            total += 1.0 / lin
    if n == 0:
        raise EmptyListError("no SNR components to combine")
    if total == 0.0:
        return math.inf
    return linear_to_db(1.0 / total)


def remove_contribution(total_db: float, component_db: float) -> float:
    """Undo one reciprocal contribution: the SNR left after taking
    `component_db` out of `total_db`.

    Requires the component to be strictly larger (less noisy) than the
    total; otherwise :class:`NonPositiveRemainderError` is raised, which in
    probing practice signals an inconsistent transceiver characteristic.
    """
    total_lin = db_to_linear(total_db)
    comp_lin = db_to_linear(component_db)
    if comp_lin == math.inf:
        return total_db
    if total_lin == 0.0:
        return -math.inf
    if comp_lin <= total_lin:
        raise NonPositiveRemainderError(
            f"component {component_db} dB <= total {total_db} dB")
    remainder = 1.0 / total_lin - 1.0 / comp_lin
    return linear_to_db(1.0 / remainder)
