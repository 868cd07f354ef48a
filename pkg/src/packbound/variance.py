"""Number variance in spherical windows and the Yamada realizability check.

For the hard-core test models the variance factorizes as

    sigma^2(R) = rho v1(R) [ 1 - 2^d phi I(R) + Z alpha2(1; R) ]

with I(R) the integral of alpha2(u^(1/d); R) du over u in [0, min(sigma,2R)^d]
(the continuous part of h is -1 on [0, sigma) and 0 beyond) and the contact
term handled analytically since quadrature cannot resolve a Dirac mass. For
2R <= sigma the integral covers the whole overlap support, I = R^d exactly,
and the variance collapses to x(1-x) with x = 2^d phi R^d.

The Yamada condition sigma^2 >= theta(1-theta), theta the fractional part of
the expected count rho v1(R), only binds for windows larger than
R0 = phi^(-1/d)/2 (below R0 the exact x(1-x) form saturates it). The checker
walks a geometric R grid, densified with the worst-case radii where the
expected count is half-integer (theta = 1/2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .geometry import alpha2
from .models import PackingDensity, RadialModel

__all__ = [
    "VarianceCheck",
    "number_variance",
    "variance_lower_bound",
    "fractional_count_bound",
    "yamada_check",
    "variance_to_csv",
]

# beyond this the spacing of doubles exceeds 1, the fractional part of the
# expected count is unresolvable, and the bound is capped at its maximum
_COUNT_RESOLUTION = 2.0**53


@dataclass(frozen=True)
class VarianceCheck:
    R: np.ndarray
    sigma2: np.ndarray
    yamada_bound: np.ndarray
    R0: float
    violations: list[float] = field(default_factory=list)

    def __post_init__(self):
        if len(self.R) != len(self.sigma2) or len(self.R) != len(self.yamada_bound):
            raise ValueError("grid and value arrays must have equal length")
        if np.min(self.sigma2) < -1e-12:
            raise ValueError(f"negative variance entry: {np.min(self.sigma2):.3e}")
        if np.min(self.yamada_bound) < 0.0 or np.max(self.yamada_bound) > 0.25 + 1e-15:
            raise ValueError("yamada bound entries must lie in [0, 1/4]")
        if any(r <= self.R0 for r in self.violations):
            raise ValueError("violations must lie beyond R0")


def _log_expected_count(d: int, phi: float, R: float) -> float:
    # rho v1(R) = phi (2R)^d
    return d * math.log(2.0 * R) + math.log(phi)


def number_variance(model: RadialModel, density: PackingDensity, R: float) -> float:
    """Variance of the particle count in a window of radius R."""
    if R <= 0.0:
        raise ValueError(f"window radius must be positive, got {R}")
    d, phi = density.d, density.phi
    if phi == 0.0:
        return 0.0
    sigma, Z = model.sigma, model.Z
    log_count = _log_expected_count(d, phi, R)

    if 2.0 * R <= sigma:
        # overlap support fully inside the core: the integral is R^d exactly,
        # and expm1 keeps the bracket accurate when the count approaches 1
        bracket = -math.expm1(log_count)
    else:
        u_hi = math.exp(d * math.log(min(sigma, 2.0 * R)))
        integral, err = quad(
            lambda u: alpha2(d, u ** (1.0 / d), R), 0.0, u_hi, epsabs=0.0, epsrel=1e-9, limit=200
        )
        if err > 1e-7 * abs(integral):
            warnings.warn(
                f"variance quadrature error {err:.2e} at R={R:.4g} exceeds its tolerance",
                RuntimeWarning,
            )
        bracket = -math.expm1(d * math.log(2.0) + math.log(phi) + math.log(integral))
    if Z > 0.0:
        bracket += Z * alpha2(d, 1.0, R)
    count = math.exp(log_count) if log_count < 700.0 else math.inf
    if math.isinf(count) and bracket <= 0.0:
        raise OverflowError(f"expected count overflows at d={d}, R={R}")
    return count * bracket


def variance_lower_bound(d: int, phi: float, R: float) -> float:
    """x(1-x) with x = 2^d phi R^d; exact for 2R <= sigma and a bound beyond."""
    if R <= 0.0:
        raise ValueError(f"window radius must be positive, got {R}")
    if phi == 0.0:
        return 0.0
    x = math.exp(_log_expected_count(d, phi, R))
    return x * (1.0 - x)


def fractional_count_bound(expected_count: float) -> float:
    """theta(1-theta) for theta the fractional part of the expected count.

    Counts at or beyond the integer resolution of doubles get the worst-case
    1/4, which keeps the check conservative instead of silently passing.
    """
    if expected_count < 0.0:
        raise ValueError("expected count must be nonnegative")
    if not math.isfinite(expected_count) or expected_count >= _COUNT_RESOLUTION:
        return 0.25
    theta = expected_count - math.floor(expected_count)
    return theta * (1.0 - theta)


def _r_grid(d: int, phi: float, R0: float, R_max: float, n_grid: int) -> np.ndarray:
    lo = R0 * (1.0 + 1e-6)
    grid = np.geomspace(lo, R_max, n_grid)
    # radii where the expected count is half-integer: theta exactly 1/2
    extras = []
    j = 0
    while len(extras) < 2 * n_grid:
        r = 0.5 * math.exp((math.log(j + 0.5) - math.log(phi)) / d)
        j += 1
        if r <= lo:
            continue
        if r > R_max:
            break
        extras.append(r)
    return np.unique(np.concatenate([grid, np.asarray(extras)]))


def yamada_check(
    model: RadialModel, density: PackingDensity, R_max: float, n_grid: int = 500
) -> VarianceCheck:
    """Test sigma^2(R) >= theta(1-theta) on (R0, R_max]; collect violating R."""
    d, phi = density.d, density.phi
    R0 = 0.5 * math.exp(-math.log(phi) / d)
    if R_max <= R0:
        raise ValueError(f"R_max={R_max} must exceed R0={R0:.6g}")
    if n_grid < 2:
        raise ValueError("need at least two grid points")
    rr = _r_grid(d, phi, R0, R_max, n_grid)
    sigma2 = np.array([number_variance(model, density, r) for r in rr])
    bounds = np.array(
        [fractional_count_bound(math.exp(_log_expected_count(d, phi, r))) for r in rr]
    )
    violations = [float(r) for r, s, b in zip(rr, sigma2, bounds) if s < b - 1e-10]
    return VarianceCheck(R=rr, sigma2=sigma2, yamada_bound=bounds, R0=R0, violations=violations)


def variance_to_csv(check: VarianceCheck) -> str:
    lines = ["R,sigma2,yamada_bound,violated"]
    vio = set(check.violations)
    for r, s, b in zip(check.R, check.sigma2, check.yamada_bound):
        flag = "true" if float(r) in vio else "false"
        lines.append(f"{r:.6e},{s:.6e},{b:.6e},{flag}")
    return "\n".join(lines) + "\n"
