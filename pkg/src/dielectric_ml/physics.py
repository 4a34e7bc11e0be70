"""Closed-form dielectric models for single cells in suspension.

Covers the homogeneous-sphere field solution, the single-shell
cell-electrolyte equivalent circuit, Cole-Cole dispersion of complex
permittivity, and the loss descriptors (imaginary permittivity, loss
tangent, charge relaxation time) derived from measured conductivity and
relative permittivity.

All operations are pure functions over immutable value types and never
return NaN or infinity: inputs outside an operation's domain raise
DomainError / InvalidParameterError instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InvalidParameterError

# Vacuum permittivity (F/m), CODATA 2018.
EPS0 = 8.8541878128e-12


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SphereModel:
    """Homogeneous dielectric sphere in a uniform external field.

    e0      applied field magnitude (V/m), >= 0
    radius  sphere radius (m), > 0
    eps_r   relative permittivity of the bulk, > 0
    """

    e0: float
    radius: float
    eps_r: float

    def __post_init__(self):
        for name in ("e0", "radius", "eps_r"):
            _require_finite(name, getattr(self, name))
        if self.e0 < 0:
            raise InvalidParameterError(f"e0 must be >= 0, got {self.e0}")
        if self.radius <= 0:
            raise InvalidParameterError(f"radius must be > 0, got {self.radius}")
        if self.eps_r <= 0:
            raise InvalidParameterError(f"eps_r must be > 0, got {self.eps_r}")


@dataclass(frozen=True)
class FieldSample:
    """Cartesian electric field components (V/m)."""

    ex: float
    ey: float
    ez: float

    def __post_init__(self):
        for name in ("ex", "ey", "ez"):
            _require_finite(name, getattr(self, name))


@dataclass(frozen=True)
class CircuitParams:
    """Single-shell cell-electrolyte equivalent circuit.

    r_e  electrolyte resistance (ohm), > 0
    r_i  cytoplasmic resistance (ohm), > 0
    c_m  membrane capacitance (F), > 0
    """

    r_e: float
    r_i: float
    c_m: float

    def __post_init__(self):
        for name in ("r_e", "r_i", "c_m"):
            value = getattr(self, name)
            _require_finite(name, value)
            if value <= 0:
                raise InvalidParameterError(f"{name} must be > 0, got {value}")


@dataclass(frozen=True)
class ColeColeParams:
    """Cole-Cole dispersion parameters.

    eps_inf  high-frequency permittivity limit, > 0
    eps_s    static permittivity limit, >= eps_inf
    tau      characteristic relaxation time (s), > 0
    alpha    broadening exponent in [0, 1]; 0 recovers Debye relaxation
    sigma_i  ionic conductivity (S/m), >= 0
    """

    eps_inf: float
    eps_s: float
    tau: float
    alpha: float
    sigma_i: float

    def __post_init__(self):
        for name in ("eps_inf", "eps_s", "tau", "alpha", "sigma_i"):
            _require_finite(name, getattr(self, name))
        if self.eps_inf <= 0:
            raise InvalidParameterError(f"eps_inf must be > 0, got {self.eps_inf}")
        if self.eps_s < self.eps_inf:
            raise InvalidParameterError(
                f"eps_s must be >= eps_inf, got eps_s={self.eps_s} < eps_inf={self.eps_inf}"
            )
        if self.tau <= 0:
            raise InvalidParameterError(f"tau must be > 0, got {self.tau}")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidParameterError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.sigma_i < 0:
            raise InvalidParameterError(f"sigma_i must be >= 0, got {self.sigma_i}")


def internal_field(m: SphereModel) -> float:
    """Uniform field magnitude inside a homogeneous dielectric sphere.

    E_in = 3 E0 / (eps_r + 2); equals E0 for a vacuum sphere (eps_r = 1)
    and decreases monotonically with eps_r (dielectric screening).
    """
    return 3.0 * m.e0 / (m.eps_r + 2.0)


def surface_potential(m: SphereModel, theta: float) -> float:
    """Scalar potential on the sphere surface at polar angle theta (rad).

    Phi = -E_in * R * cos(theta); antisymmetric about theta = pi/2.
    """
    _require_finite("theta", theta)
    return -internal_field(m) * m.radius * math.cos(theta)


def field_magnitude(s: FieldSample) -> float:
    """Euclidean magnitude of a Cartesian field sample."""
    return math.hypot(s.ex, s.ey, s.ez)


def mixture_impedance(c: CircuitParams, f: float) -> complex:
    """Impedance of the single-shell cell-electrolyte circuit at frequency f (Hz).

    Z = R_e (1 + jw R_i C_m) / (jw R_e C_m + (1 + jw R_i C_m)(1 + jw R_e C_m))

    with w = 2 pi f. Collapses to R_e at DC; magnitude falls to zero as the
    membrane capacitance shorts at high frequency.
    """
    _require_finite("f", f)
    if f < 0:
        raise DomainError(f"frequency must be >= 0, got {f}")
    w = 2.0 * math.pi * f
    jwric = 1j * w * c.r_i * c.c_m
    jwrec = 1j * w * c.r_e * c.c_m
    return c.r_e * (1.0 + jwric) / (jwrec + (1.0 + jwric) * (1.0 + jwrec))


def capacitive_reactance(c_m: float, f: float) -> float:
    """Membrane capacitive reactance 1 / (2 pi f C_m), in ohm.

    Raises DomainError at f <= 0 or c_m <= 0: the DC blocking limit is not
    representable as a finite reactance and is surfaced as an error.
    """
    _require_finite("c_m", c_m)
    _require_finite("f", f)
    if f <= 0:
        raise DomainError(f"frequency must be > 0, got {f}")
    if c_m <= 0:
        raise DomainError(f"membrane capacitance must be > 0, got {c_m}")
    return 1.0 / (2.0 * math.pi * f * c_m)


def cole_cole_permittivity(p: ColeColeParams, f: float) -> complex:
    """Complex relative permittivity eps* = eps' - j eps'' at frequency f (Hz).

    eps*(w) = eps_inf + (eps_s - eps_inf) / (1 + (j w tau)^(1 - alpha))
              + sigma_i / (j w eps0)

    The complex power uses the principal branch, so alpha = 0 reduces to
    Debye relaxation. The conduction term diverges at DC, hence f = 0 with
    sigma_i > 0 raises DomainError.
    """
    _require_finite("f", f)
    if f < 0:
        raise DomainError(f"frequency must be >= 0, got {f}")
    if f == 0:
        if p.sigma_i > 0:
            raise DomainError("f = 0 with sigma_i > 0: conduction term diverges at DC")
        return complex(p.eps_s, 0.0)
    w = 2.0 * math.pi * f
    jwt_pow = (1j * w * p.tau) ** (1.0 - p.alpha)
    eps = p.eps_inf + (p.eps_s - p.eps_inf) / (1.0 + jwt_pow)
    if p.sigma_i > 0:
        eps = eps + p.sigma_i / (1j * w * EPS0)
    return eps


def imaginary_permittivity(sigma: float, f: float) -> float:
    """Conduction-loss imaginary permittivity sigma / (2 pi f eps0)."""
    _require_finite("sigma", sigma)
    _require_finite("f", f)
    if f <= 0:
        raise DomainError(f"frequency must be > 0, got {f}")
    if sigma < 0:
        raise DomainError(f"conductivity must be >= 0, got {sigma}")
    return sigma / (2.0 * math.pi * f * EPS0)


def loss_tangent(sigma: float, eps_r: float, f: float) -> float:
    """Loss tangent tan(delta) = eps'' / eps_r."""
    _require_finite("eps_r", eps_r)
    if eps_r <= 0:
        raise DomainError(f"relative permittivity must be > 0, got {eps_r}")
    return imaginary_permittivity(sigma, f) / eps_r


def charge_relaxation_time(sigma: float, eps_r: float) -> float:
    """Maxwell charge relaxation time eps0 * eps_r / sigma, in seconds.

    Raises DomainError at sigma <= 0: an insulating sample has no finite
    relaxation time and infinity is never returned.
    """
    _require_finite("sigma", sigma)
    _require_finite("eps_r", eps_r)
    if sigma <= 0:
        raise DomainError(f"conductivity must be > 0, got {sigma}")
    if eps_r <= 0:
        raise DomainError(f"relative permittivity must be > 0, got {eps_r}")
    return EPS0 * eps_r / sigma
