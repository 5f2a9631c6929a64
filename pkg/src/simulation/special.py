"""Gamma special functions behind the reaction-time model.

The incomplete gamma function follows the classic split: power series below
``x < a + 1`` and a modified-Lentz continued fraction above it (the layout of
"Numerical Recipes", chapter 6). The inverse CDF is a safeguarded Newton
iteration started from the Wilson-Hilferty approximation, with bisection as the
fallback when Newton stalls.
"""

import math
import sys
from dataclasses import dataclass
from statistics import NormalDist

# Convergence settings for the series / continued fraction expansions
SERIES_EPSILON = 1.0e-16
MAX_EXPANSION_TERMS = 2000
TINY = sys.float_info.min / sys.float_info.epsilon

INVERSE_TOLERANCE = 1.0e-12
MAX_NEWTON_STEPS = 100
MAX_BISECTION_STEPS = 400

_STANDARD_NORMAL = NormalDist()


@dataclass(frozen=True)
class GammaSpec:
    """Gamma distribution with shape ``a`` (dimensionless) and scale ``b`` (s)."""
    shape: float
    scale: float

    def __post_init__(self):
        if not (math.isfinite(self.shape) and self.shape > 0):
            raise ValueError(f"gamma shape must be > 0, got {self.shape}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"gamma scale must be > 0, got {self.scale}")

    @classmethod
    def from_moments(cls, mean: float, std: float) -> 'GammaSpec':
        """Method-of-moments fit: ``a = (mean/std)²``, ``b = std²/mean``."""
        if mean <= 0 or std <= 0:
            raise ValueError("mean and std must be > 0")
        return cls(shape=(mean / std) ** 2, scale=std * std / mean)

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def std(self) -> float:
        return math.sqrt(self.shape) * self.scale


def gamma_function(a: float) -> float:
    """
    Gamma function Γ(a) for a > 0.

    Args:
        a: Argument, must be positive and finite

    Returns:
        Γ(a)
    """
    if not (math.isfinite(a) and a > 0):
        raise ValueError(f"gamma_function requires a > 0, got {a}")
    return math.gamma(a)


def log_gamma_function(a: float) -> float:
    """Natural logarithm of Γ(a) for a > 0 (no overflow for large a)."""
    if not (math.isfinite(a) and a > 0):
        raise ValueError(f"log_gamma_function requires a > 0, got {a}")
    return math.lgamma(a)


def _lower_series(a: float, x: float) -> float:
    """P(a, x) by its power series; converges quickly for x < a + 1."""
    term = 1.0 / a
    total = term
    denominator = a
    for _ in range(MAX_EXPANSION_TERMS):
        denominator += 1.0
        term *= x / denominator
        total += term
        if abs(term) < abs(total) * SERIES_EPSILON:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _upper_continued_fraction(a: float, x: float) -> float:
    """Q(a, x) = 1 - P(a, x) by modified Lentz; converges for x >= a + 1."""
    b = x + 1.0 - a
    c = 1.0 / TINY
    d = 1.0 / b
    h = d
    for i in range(1, MAX_EXPANSION_TERMS + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < TINY:
            d = TINY
        c = b + an / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < SERIES_EPSILON:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def regularized_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(a, x)."""
    if not (math.isfinite(a) and a > 0):
        raise ValueError(f"a must be > 0, got {a}")
    if math.isnan(x) or x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(1.0, _lower_series(a, x))
    return max(0.0, 1.0 - _upper_continued_fraction(a, x))


def gamma_cdf(t: float, spec: GammaSpec) -> float:
    """
    Gamma CDF F(t | a, b) = P(a, t / b).

    Args:
        t: Time (s), must be >= 0
        spec: Gamma shape/scale

    Returns:
        Probability in [0, 1]
    """
    if math.isnan(t) or t < 0:
        raise ValueError(f"gamma_cdf requires t >= 0, got {t}")
    return regularized_lower_gamma(spec.shape, t / spec.scale)


def gamma_pdf(t: float, spec: GammaSpec) -> float:
    """Gamma density at ``t``; the derivative of ``gamma_cdf``."""
    if math.isnan(t) or t < 0:
        raise ValueError(f"gamma_pdf requires t >= 0, got {t}")
    a, b = spec.shape, spec.scale
    if t == 0:
        if a < 1:
            return math.inf
        return 1.0 / b if a == 1 else 0.0
    log_density = (a - 1.0) * math.log(t) - t / b - math.lgamma(a) - a * math.log(b)
    return math.exp(log_density)


def _initial_guess(p: float, a: float) -> float:
    """Wilson-Hilferty start (in units of the scale), small-p fallback."""
    z = _STANDARD_NORMAL.inv_cdf(p)
    c = 1.0 / (9.0 * a)
    guess = a * (1.0 - c + z * math.sqrt(c)) ** 3
    if guess > 0 and math.isfinite(guess):
        return guess
    # Lower tail: P(a, x) ~ x^a / Γ(a + 1)
    return math.exp((math.log(p) + math.lgamma(a + 1.0)) / a)


def gamma_inv_cdf(p: float, spec: GammaSpec) -> float:
    """
    Inverse gamma CDF: the ``t`` with F(t | a, b) = p.

    Args:
        p: Probability, strictly between 0 and 1
        spec: Gamma shape/scale

    Returns:
        Quantile ``t`` (s) with |F(t) - p| <= 1e-9
    """
    if not (0.0 < p < 1.0):
        raise ValueError(f"gamma_inv_cdf requires 0 < p < 1, got {p}")

    x = _initial_guess(p, spec.shape) * spec.scale
    lo, hi = 0.0, math.inf

    for _ in range(MAX_NEWTON_STEPS):
        residual = gamma_cdf(x, spec) - p
        if abs(residual) <= INVERSE_TOLERANCE:
            return x
        if residual < 0:
            lo = x
        else:
            hi = x

        density = gamma_pdf(x, spec)
        candidate = x - residual / density if density > 0 and math.isfinite(density) else math.nan
        if not (lo < candidate < hi):
            # Newton left the bracket: bisect, or expand while no upper bound is known
            candidate = 0.5 * (lo + hi) if math.isfinite(hi) else 2.0 * max(x, spec.scale)
        if candidate == x:
            return x
        x = candidate

    return _bisect_inverse(p, spec, lo, hi)


def _bisect_inverse(p: float, spec: GammaSpec, lo: float, hi: float) -> float:
    """Plain bisection on the CDF within [lo, hi]."""
    if not math.isfinite(hi):
        hi = max(lo, spec.mean, spec.scale)
        while gamma_cdf(hi, spec) < p:
            hi *= 2.0
    mid = 0.5 * (lo + hi)
    for _ in range(MAX_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        residual = gamma_cdf(mid, spec) - p
        if abs(residual) <= INVERSE_TOLERANCE or mid in (lo, hi):
            return mid
        if residual < 0:
            lo = mid
        else:
            hi = mid
    return mid
