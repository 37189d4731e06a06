"""Numerically stable special functions for detector response calculations.

The closed-form transition probabilities multiply enormously large factors
(``sinh**2`` or squared modified Bessel functions with arguments up to
``~1e5``) by enormously small Gaussian suppression factors.  Neither factor is
representable in double precision on its own, so every evaluation here is done
in log space: quantities are carried as :class:`LogValue` (a sign plus the log
of the magnitude) and only exponentiated at the very end.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import special

__all__ = [
    "LogValue",
    "PrecisionLossWarning",
    "log_bessel_i",
    "pole_removed_coth",
    "angular_exp_integral",
    "gaussian_window",
    "log_gaussian_window",
    "log_sinh",
    "log_cosh",
]

#: Relative cancellation below which a signed sum is flagged as unreliable.
_CANCELLATION_THRESHOLD = 1e-8

#: Arguments below this use the Maclaurin series of coth(u) - 1/u.
_COTH_SERIES_THRESHOLD = 1e-2


class PrecisionLossWarning(RuntimeWarning):
    """Raised when a signed log-space sum cancels almost completely."""


@dataclass(frozen=True)
class LogValue:
    """A real number ``sign * exp(log_magnitude)``.

    ``sign`` is ``0`` iff the value is exactly zero (``log_magnitude`` is then
    ``-inf``).  Multiplication adds logs; addition goes through a max-factored
    log-sum.  Subtractions that cancel more than a relative
    ``1e-8`` emit :class:`PrecisionLossWarning`.
    """

    log_magnitude: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")
        if self.sign == 0 and self.log_magnitude != -math.inf:
            object.__setattr__(self, "log_magnitude", -math.inf)
        if self.sign != 0 and math.isnan(self.log_magnitude):
            raise ValueError("log magnitude is NaN")

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(-math.inf, 0)

    @classmethod
    def one(cls) -> "LogValue":
        return cls(0.0, 1)

    @classmethod
    def from_float(cls, x: float) -> "LogValue":
        if x == 0.0:
            return cls.zero()
        if math.isnan(x):
            raise ValueError("cannot represent NaN")
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    @classmethod
    def from_log(cls, log_magnitude: float, sign: int = 1) -> "LogValue":
        if log_magnitude == -math.inf:
            return cls.zero()
        return cls(log_magnitude, sign)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    @property
    def underflows(self) -> bool:
        """True when ``to_float`` loses the value to double underflow."""
        return self.sign != 0 and self.log_magnitude < -745.0

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            mag = math.exp(self.log_magnitude)
        except OverflowError:
            mag = math.inf
        return self.sign * mag

    def __float__(self) -> float:
        return self.to_float()

    def __mul__(self, other: "LogValue") -> "LogValue":
        if not isinstance(other, LogValue):
            return NotImplemented
        s = self.sign * other.sign
        if s == 0:
            return LogValue.zero()
        return LogValue(self.log_magnitude + other.log_magnitude, s)

    def __neg__(self) -> "LogValue":
        return LogValue(self.log_magnitude, -self.sign)

    def __pow__(self, n: int) -> "LogValue":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        if self.sign == 0:
            return LogValue.one() if n == 0 else LogValue.zero()
        sign = -1 if (self.sign < 0 and n % 2 == 1) else 1
        return LogValue(n * self.log_magnitude, sign)

    def __add__(self, other: "LogValue") -> "LogValue":
        if not isinstance(other, LogValue):
            return NotImplemented
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.log_magnitude >= other.log_magnitude else (other, self)
        d = small.log_magnitude - big.log_magnitude  # <= 0
        if self.sign == other.sign:
            return LogValue(big.log_magnitude + math.log1p(math.exp(d)), big.sign)
        if d == 0.0:
            warnings.warn("exact cancellation in log-space sum", PrecisionLossWarning, stacklevel=2)
            return LogValue.zero()
        rest = -math.expm1(d)  # 1 - exp(d), in (0, 1)
        if rest < _CANCELLATION_THRESHOLD:
            warnings.warn(
                f"log-space subtraction cancels to {rest:.3e} of the larger operand",
                PrecisionLossWarning,
                stacklevel=2,
            )
        return LogValue(big.log_magnitude + math.log(rest), big.sign)

    def __sub__(self, other: "LogValue") -> "LogValue":
        if not isinstance(other, LogValue):
            return NotImplemented
        return self.__add__(-other)

    def _key(self):
        return self.sign, self.sign * self.log_magnitude if self.sign else 0.0

    def __lt__(self, other: "LogValue") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "LogValue") -> bool:
        return self._key() <= other._key()


def log_bessel_i(order: float, x: float) -> LogValue:
    """``ln I_nu(x)`` of the modified Bessel function of the first kind.

    Evaluated through the exponentially scaled form ``e^{-x} I_nu(x)`` so that
    arguments up to ``1e5`` stay finite.

    Parameters
    ----------
    order : float
        Order ``nu >= 0``; half-integers and integers arise in practice.
    x : float
        Argument ``x >= 0``.

    Returns
    -------
    LogValue
    """
    if order < 0:
        raise ValueError(f"Bessel order must be non-negative, got {order}")
    if x < 0:
        raise ValueError(f"Bessel argument must be non-negative, got {x}")
    if x == 0.0:
        return LogValue.one() if order == 0 else LogValue.zero()
    scaled = special.ive(order, x)
    if scaled > 0.0:
        return LogValue(math.log(scaled) + x, 1)
    # ive underflows for tiny x at large order; leading power-series term.
    lm = order * math.log(x / 2.0) - math.lgamma(order + 1.0) + math.log1p(
        x * x / (4.0 * (order + 1.0))
    )
    return LogValue(lm, 1)


def pole_removed_coth(u: float) -> float:
    """``coth(u) - 1/u`` with the removable pole at ``u = 0`` taken by series.

    Monotone nondecreasing on ``[0, inf)`` with range ``[0, 1)``.
    """
    if u < 0:
        raise ValueError(f"argument must be non-negative, got {u}")
    if u < _COTH_SERIES_THRESHOLD:
        u2 = u * u
        # u/3 - u^3/45 + 2u^5/945 - u^7/4725
        return u * (1.0 / 3.0 + u2 * (-1.0 / 45.0 + u2 * (2.0 / 945.0 - u2 / 4725.0)))
    if u > 20.0:
        # tanh(u) == 1 to machine precision
        return 1.0 - 1.0 / u + 2.0 * math.exp(-2.0 * u)
    return 1.0 / math.tanh(u) - 1.0 / u


def angular_exp_integral(n: int, a: float) -> LogValue:
    """Integral of ``exp(a*cos(theta))`` over the unit sphere ``S^{n-1}``.

    Closed form ``2 pi^{n/2} (a/2)^{1-n/2} I_{(n-2)/2}(a)``; at ``a = 0`` this
    is the solid angle ``2 pi^{n/2} / Gamma(n/2)``.
    """
    if not isinstance(n, (int,)) or isinstance(n, bool):
        raise ValueError(f"dimension must be an integer, got {n!r}")
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if a < 0:
        raise ValueError(f"argument must be non-negative, got {a}")
    if a == 0.0:
        lm = math.log(2.0) + 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n)
        return LogValue(lm, 1)
    nu = 0.5 * (n - 2)
    lb = log_bessel_i(nu, a)
    lm = (
        math.log(2.0)
        + 0.5 * n * math.log(math.pi)
        + (1.0 - 0.5 * n) * math.log(0.5 * a)
        + lb.log_magnitude
    )
    return LogValue(lm, lb.sign)


def gaussian_window(epsilon: float, T: float) -> float:
    """Fourier transform ``sqrt(pi) T exp(-epsilon^2 T^2 / 4)`` of the Gaussian
    switching ``chi_T(t) = exp(-t^2/T^2)``.

    Integrates to ``2*pi`` over ``epsilon`` for every ``T``, so it acts as a
    ``2*pi*delta(epsilon)`` surrogate as ``T`` grows.
    """
    if T <= 0:
        raise ValueError(f"switching timescale must be positive, got {T}")
    return math.sqrt(math.pi) * T * math.exp(-0.25 * (epsilon * T) ** 2)


def log_gaussian_window(epsilon: float, T: float) -> float:
    """``ln`` of :func:`gaussian_window`; never under- or overflows."""
    if T <= 0:
        raise ValueError(f"switching timescale must be positive, got {T}")
    return 0.5 * math.log(math.pi) + math.log(T) - 0.25 * (epsilon * T) ** 2


def log_sinh(x: float) -> float:
    """``ln sinh(x)`` for ``x >= 0``, accurate from tiny to huge arguments."""
    if x < 0:
        raise ValueError(f"argument must be non-negative, got {x}")
    if x == 0.0:
        return -math.inf
    # sinh x = e^x (1 - e^{-2x}) / 2 and 1 - e^{-2x} = -expm1(-2x)
    return x - math.log(2.0) + math.log(-math.expm1(-2.0 * x))


def log_cosh(x: float) -> float:
    """``ln cosh(x)`` for ``x >= 0``."""
    if x < 0:
        raise ValueError(f"argument must be non-negative, got {x}")
    return x - math.log(2.0) + math.log1p(math.exp(-2.0 * x))
