"""Radial kernel profiles and the constants used by the smoothed estimators.

A profile is a nonnegative function on [0, inf) supported in [0, 1).  Three
roles appear in the estimator:

* ``rho``  smooths the tensor-valued variations (needs rho decreasing with
  rho'(0) = 0);
* ``xi``   smooths the mass measure in the denominators;
* ``eta``  smooths the direction matrix (defaults to rho).

Pairing xi to rho through  n * xi(s) = -s * rho'(s)  makes the ratio of the
normalizing constants come out to exactly d/n, which is the prefactor used in
all the point-cloud formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import InvalidInputError, InvalidProfileError, QuadratureError


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d (omega_d)."""
    if d < 0:
        raise ValueError("dimension must be nonnegative")
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def _vectorized(fn: Callable[[np.ndarray], np.ndarray]):
    """Wrap an array-only radial function so scalars map to floats."""

    def wrapped(t):
        arr = np.asarray(t, dtype=float)
        out = fn(np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out

    return wrapped


@dataclass(frozen=True)
class KernelProfile:
    """Radial profile with derivative access; vanishes on [1, inf)."""

    name: str
    eval: Callable = field(repr=False)
    deriv: Callable = field(repr=False)
    support_radius: float = 1.0

    def __call__(self, t):
        return self.eval(t)


# Below 1 - t^2 = 1e-8 the bump value exp(-1/(1-t^2)) underflows to exactly
# zero in float64, so the cutoff loses nothing and avoids overflow in the
# rational prefactors of the derivative.
_BUMP_CUTOFF = 1e-8


def _bump_eval(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    u = 1.0 - t * t
    m = (t >= 0.0) & (u > _BUMP_CUTOFF)
    out[m] = np.exp(-1.0 / u[m])
    return out


def _bump_deriv(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    u = 1.0 - t * t
    m = (t >= 0.0) & (u > _BUMP_CUTOFF)
    um = u[m]
    out[m] = -2.0 * t[m] / (um * um) * np.exp(-1.0 / um)
    return out


def bump_profile() -> KernelProfile:
    """Smooth bump exp(-1/(1-t^2)) on [0,1), identically zero beyond.

    Unnormalized on purpose: the estimator formulas only ever use ratios in
    which the normalization cancels.  Decreasing, with derivative zero at 0.
    """
    return KernelProfile("bump", _vectorized(_bump_eval), _vectorized(_bump_deriv))


def tent_profile() -> KernelProfile:
    """Piecewise-linear 1 - t on [0,1); testing only (slope at 0 is -1)."""

    def ev(t):
        return np.where((t >= 0.0) & (t < 1.0), 1.0 - t, 0.0)

    def dv(t):
        return np.where((t > 0.0) & (t < 1.0), -1.0, 0.0)

    return KernelProfile("tent", _vectorized(ev), _vectorized(dv))


def box_profile() -> KernelProfile:
    """Indicator of [0,1); testing only (its paired mass profile is zero)."""

    def ev(t):
        return np.where((t >= 0.0) & (t < 1.0), 1.0, 0.0)

    def dv(t):
        return np.zeros_like(np.asarray(t, dtype=float))

    return KernelProfile("box", _vectorized(ev), _vectorized(dv))


_PROFILES = {"bump": bump_profile, "tent": tent_profile, "box": box_profile}


def profile_by_name(name: str) -> KernelProfile:
    try:
        return _PROFILES[name]()
    except KeyError:
        raise InvalidInputError(
            f"unknown kernel profile {name!r}; choose from {sorted(_PROFILES)}"
        ) from None


def paired_mass_profile(rho: KernelProfile, ambient_n: int) -> KernelProfile:
    """Mass-smoothing profile xi with n * xi(s) = -s * rho'(s).

    Nonnegative whenever ``rho`` is decreasing; rejects profiles that
    increase anywhere on a sample grid.
    """
    grid = np.linspace(0.0, 1.0, 2001)
    dv = np.asarray(rho.deriv(grid))
    if np.any(dv > 1e-12):
        raise InvalidProfileError(
            f"profile {rho.name!r} increases on [0,1); cannot pair a mass profile"
        )

    def ev(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= 0.0) & (t < 1.0)
        out = np.zeros_like(t)
        out[inside] = -t[inside] * np.asarray(rho.deriv(t[inside])) / ambient_n
        return out

    def dvv(t):
        # Central difference; the profile derivative is only needed for
        # diagnostics, never in the estimator formulas.
        t = np.asarray(t, dtype=float)
        h = 1e-6
        lo = np.maximum(t - h, 0.0)
        hi = t + h
        return (ev(hi) - ev(lo)) / (hi - lo)

    return KernelProfile(f"nkp({rho.name})", _vectorized(ev), _vectorized(dvv))


def kernel_constant(profile: KernelProfile, d: int, rel_tol: float = 1e-8) -> float:
    """The constant d * omega_d * int_0^1 profile(r) r^(d-1) dr.

    Adaptive quadrature (QUADPACK); the bump is flat-zero at r -> 1 so the
    endpoint needs no special treatment beyond the adaptive subdivision.
    """
    if d < 1:
        raise ValueError("d must be >= 1")

    def integrand(r):
        return profile.eval(r) * r ** (d - 1)

    val, err = quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-10, limit=200)
    if not np.isfinite(val) or (val != 0.0 and err > rel_tol * abs(val)):
        raise QuadratureError(
            f"radial moment of {profile.name!r} did not converge: "
            f"value {val:.6g}, error estimate {err:.2g}"
        )
    return d * unit_ball_volume(d) * val


@dataclass(frozen=True)
class KernelPair:
    """Profiles rho/xi/eta plus their normalizing constants.

    ``ratio`` is C_xi / C_rho, the prefactor of the smoothed variation
    tensor.  For pairs built by :func:`natural_kernel_pair` it equals d/n
    exactly (integration by parts); the quadrature values are kept as a
    cross-check.
    """

    rho: KernelProfile
    xi: KernelProfile
    eta: KernelProfile
    c_rho: float
    c_xi: float
    ratio: float
    dim_d: int
    ambient_n: int


def natural_kernel_pair(rho: KernelProfile, d: int, n: int) -> KernelPair:
    """Build the kernel pair with xi tied to rho and eta defaulting to rho."""
    xi = paired_mass_profile(rho, n)
    c_rho = kernel_constant(rho, d)
    c_xi = kernel_constant(xi, d)
    return KernelPair(
        rho=rho, xi=xi, eta=rho, c_rho=c_rho, c_xi=c_xi,
        ratio=d / n, dim_d=d, ambient_n=n,
    )


def kernel_pair_by_name(name: str, d: int, n: int) -> KernelPair:
    return natural_kernel_pair(profile_by_name(name), d, n)
