"""Field-theoretic ingredients shared by all detector models.

Dispersion relations, normalized Gaussian momentum spectra, Dirac-basis
spinor mode functions and transverse polarization bases.  Conventions baked
in: natural units, the spin-z axis and the wavepacket center momentum ``k0``
are aligned, and Dirac-basis gamma matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "FieldModel",
    "Statistics",
    "WavepacketSpec",
    "DetectorSpec",
    "PolarizationPair",
    "dispersion",
    "gaussian_spectrum",
    "log_gaussian_spectrum",
    "spinor_mode_u",
    "spinor_mode_v",
    "polarization_basis",
    "GAMMA0",
    "GAMMA1",
    "GAMMA2",
    "GAMMA3",
]

_NORMALIZATION_TOL = 1e-12


class FieldModel(str, Enum):
    """Which field the detector couples to."""

    REAL_SCALAR = "real-scalar"
    VECTOR = "vector"
    FERMION = "fermion"
    COMPLEX_SCALAR = "complex-scalar"


class Statistics(str, Enum):
    """Commutation (Bose) vs anti-commutation (Fermi) for the complex scalar."""

    BOSE = "bose"
    FERMI = "fermi"


# Dirac-basis gamma matrices (used by spinor tests and the fermionic oracle).
_SIGMA = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]
GAMMA0 = np.block(
    [[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), -np.eye(2)]]
).astype(complex)
GAMMA1, GAMMA2, GAMMA3 = (
    np.block([[np.zeros((2, 2)), s], [-s, np.zeros((2, 2))]]).astype(complex)
    for s in _SIGMA
)


@dataclass(frozen=True)
class WavepacketSpec:
    """Gaussian one-particle state of the field.

    ``amplitudes`` are the model-dependent complex coefficients multiplying a
    common radial Gaussian centered at momentum magnitude ``k0`` with spectral
    width ``sigma``:

    * real scalar: no amplitudes;
    * vector: ``(alpha1, alpha2)`` for the two polarizations;
    * fermion: ``(alpha1, alpha2, beta1, beta2)`` for particle/anti-particle
      content in each spin;
    * complex scalar: ``(alpha, beta)`` for particle/anti-particle content.

    The squared magnitudes must sum to 1 (state normalization).
    """

    n: int
    m: float
    k0: float
    sigma: float
    amplitudes: tuple = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ValueError(f"spatial dimension must be an integer >= 1, got {self.n!r}")
        if self.m < 0:
            raise ValueError(f"field mass must be non-negative, got {self.m}")
        if self.k0 <= 0:
            raise ValueError(f"center momentum must be positive, got {self.k0}")
        if self.sigma <= 0:
            raise ValueError(f"spectral width must be positive, got {self.sigma}")
        if self.amplitudes:
            amps = tuple(complex(a) for a in self.amplitudes)
            object.__setattr__(self, "amplitudes", amps)
            norm = sum(abs(a) ** 2 for a in amps)
            if abs(norm - 1.0) > _NORMALIZATION_TOL:
                raise ValueError(
                    f"amplitude magnitudes must sum to 1, got {norm!r}"
                )

    @classmethod
    def real_scalar(cls, n: int, m: float, k0: float, sigma: float) -> "WavepacketSpec":
        return cls(n=n, m=m, k0=k0, sigma=sigma)

    @classmethod
    def vector(cls, k0: float, sigma: float, alpha1: complex, alpha2: complex) -> "WavepacketSpec":
        # vector model is massless and 3-dimensional
        return cls(n=3, m=0.0, k0=k0, sigma=sigma, amplitudes=(alpha1, alpha2))

    @classmethod
    def fermion(
        cls,
        m: float,
        k0: float,
        sigma: float,
        alpha1: complex,
        alpha2: complex,
        beta1: complex,
        beta2: complex,
    ) -> "WavepacketSpec":
        return cls(n=3, m=m, k0=k0, sigma=sigma, amplitudes=(alpha1, alpha2, beta1, beta2))

    @classmethod
    def complex_scalar(
        cls, n: int, m: float, k0: float, sigma: float, alpha: complex, beta: complex
    ) -> "WavepacketSpec":
        return cls(n=n, m=m, k0=k0, sigma=sigma, amplitudes=(alpha, beta))

    @property
    def resonance_omega(self) -> float:
        """Detector gap at which the adiabatic response peaks."""
        return math.hypot(self.k0, self.m)


@dataclass(frozen=True)
class DetectorSpec:
    """Two-level probe.

    ``omega`` is the energy gap (negative values describe deexcitation
    studies), ``coupling`` the coupling constant, ``delta`` the dipole length
    or interaction energy scale, ``theta`` the angle between the dipole and
    ``k0`` (vector model), and ``spinor`` the smearing spinor components
    ``(A1, A2, B1, B2)`` (fermion model, normalized).
    """

    omega: float
    coupling: float = 1.0
    delta: float = 1.0
    theta: float = 0.0
    spinor: tuple | None = None

    def __post_init__(self):
        if self.spinor is not None:
            sp = tuple(complex(a) for a in self.spinor)
            if len(sp) != 4:
                raise ValueError("smearing spinor needs exactly 4 components")
            object.__setattr__(self, "spinor", sp)
            norm = sum(abs(a) ** 2 for a in sp)
            if abs(norm - 1.0) > _NORMALIZATION_TOL:
                raise ValueError(f"spinor magnitudes must sum to 1, got {norm!r}")


class PolarizationPair(tuple):
    """Pair of transverse polarization vectors ``(eps1, eps2)``."""

    def __new__(cls, eps1: np.ndarray, eps2: np.ndarray):
        return super().__new__(cls, (np.asarray(eps1, float), np.asarray(eps2, float)))

    @property
    def eps1(self) -> np.ndarray:
        return self[0]

    @property
    def eps2(self) -> np.ndarray:
        return self[1]


def dispersion(k: float, m: float) -> float:
    """Relativistic dispersion ``omega = sqrt(k^2 + m^2)``."""
    if k < 0:
        raise ValueError(f"momentum magnitude must be non-negative, got {k}")
    if m < 0:
        raise ValueError(f"mass must be non-negative, got {m}")
    return math.hypot(k, m)


def gaussian_spectrum(k: float, spec: WavepacketSpec) -> float:
    """Radial part ``(pi sigma^2)^{-n/4} exp(-(k^2 + k0^2)/(2 sigma^2))`` of the
    normalized Gaussian momentum spectrum.

    The angular factor ``exp(k k0 cos(theta)/sigma^2)`` is supplied by the
    caller, so that the reconstructed n-dimensional profile has unit L2 norm.
    """
    return math.exp(log_gaussian_spectrum(k, spec))


def log_gaussian_spectrum(k: float, spec: WavepacketSpec) -> float:
    """``ln`` of :func:`gaussian_spectrum` (safe for narrow packets)."""
    s2 = spec.sigma * spec.sigma
    return -0.25 * spec.n * math.log(math.pi * s2) - (k * k + spec.k0 * spec.k0) / (2.0 * s2)


def _spinor_prefactor(p: np.ndarray, m: float) -> tuple[float, float]:
    omega = dispersion(float(np.linalg.norm(p)), m)
    pref = (2.0 * math.pi) ** -1.5 * math.sqrt((omega + m) / (2.0 * omega))
    return pref, omega


def spinor_mode_u(p, s: int, m: float) -> np.ndarray:
    """Dirac-basis particle spinor ``u_{p,s}`` with the plane-wave phase
    factored out.

    Includes the ``(2 pi)^{-3/2} sqrt((omega+m)/(2 omega))`` prefactor, so
    ``u^dagger u = (2 pi)^{-3}``.
    """
    if s not in (1, 2):
        raise ValueError(f"spin index must be 1 or 2, got {s}")
    p = np.asarray(p, dtype=float)
    pref, omega = _spinor_prefactor(p, m)
    px, py, pz = p
    d = omega + m
    if s == 1:
        comps = [1.0, 0.0, pz / d, (px + 1j * py) / d]
    else:
        comps = [0.0, 1.0, (px - 1j * py) / d, -pz / d]
    return pref * np.array(comps, dtype=complex)


def spinor_mode_v(p, s: int, m: float) -> np.ndarray:
    """Dirac-basis anti-particle spinor ``v_{p,s}``, phase factored out."""
    if s not in (1, 2):
        raise ValueError(f"spin index must be 1 or 2, got {s}")
    p = np.asarray(p, dtype=float)
    pref, omega = _spinor_prefactor(p, m)
    px, py, pz = p
    d = omega + m
    if s == 1:
        comps = [pz / d, (px + 1j * py) / d, 1.0, 0.0]
    else:
        comps = [(px - 1j * py) / d, -pz / d, 0.0, 1.0]
    return pref * np.array(comps, dtype=complex)


def polarization_basis(k) -> PolarizationPair:
    """Transverse polarization pair for wavevector ``k``.

    Parametrized by the polar/azimuthal angles of ``k``:
    ``eps1 = (cos t cos p, cos t sin p, -sin t)`` and
    ``eps2 = (-sin p, cos p, 0)``.  Both are unit norm, mutually orthogonal
    and orthogonal to ``k``.  The parametrization is singular at the antipode
    ``theta = pi`` (measure-zero; quadrature nodes avoid it).
    """
    k = np.asarray(k, dtype=float)
    norm = float(np.linalg.norm(k))
    if norm == 0.0:
        raise ValueError("polarization basis undefined for the zero vector")
    theta = math.acos(max(-1.0, min(1.0, k[2] / norm)))
    phi = math.atan2(k[1], k[0]) if (k[0] != 0.0 or k[1] != 0.0) else 0.0
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    eps1 = np.array([ct * cp, ct * sp, -st])
    eps2 = np.array([-sp, cp, 0.0])
    return PolarizationPair(eps1, eps2)
