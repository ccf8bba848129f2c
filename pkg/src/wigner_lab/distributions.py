"""Scalar entry laws: samplers, densities h, scores h'/h, and regularity checks.

All built-in laws are centred.  Off-diagonal matrix entries use variance 1/2
per real component, diagonal entries variance 1; the constructors accept any
positive variance so the laws can be reused in other roles (e.g. inverse
moment components).

The score integral  integral of (h'/h)^p h  is the regularity functional that
separates laws for which the microscopic eigenvalue-probability bound can hold
from discrete laws where it fails: a law without a density is rejected
outright, and a hard-edged density (uniform) is reported as divergent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import InvalidSpecError, NoDensityError
from .rng import stream

# Quadrature settings: polynomial-times-rapidly-decaying integrands, so an
# absolute tolerance with tail truncation where h drops below the floor.
QUAD_ABS_TOL = 1e-10
DENSITY_FLOOR = 1e-300
DIVERGENCE_CAP = 1e12

BUILTIN_NAMES = ("gaussian", "uniform", "bernoulli", "smoothed_bernoulli")


class EntryDistribution:
    """A centred scalar law for matrix entries.

    Concrete laws expose:

    - ``variance``, ``subgaussian_nu`` (exponential-moment metadata only),
      ``has_density``;
    - ``draw(rng, n)``: n iid variates from an explicit Generator;
    - ``sample(n, seed)``: deterministic sampling, bit-identical per
      (law, n, seed);
    - ``density`` / ``score``: h and h'/h, present only where meaningful
      (``None`` otherwise).

    Instances are immutable and picklable, safe to share across workers.
    """

    name: str = "abstract"
    has_density: bool = False
    mean: float = 0.0

    # Laws without a (differentiable) density leave these as None.
    density = None
    score = None

    variance: float
    subgaussian_nu: float

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def sample(self, n: int, seed: int) -> np.ndarray:
        if n < 1:
            raise ValueError("sample size must be >= 1")
        return self.draw(stream((int(seed),)), int(n))

    def fourth_moment(self) -> float:
        raise NotImplementedError

    def quad_support(self) -> tuple[float, float]:
        """Interval outside which h < DENSITY_FLOOR, for quadrature truncation."""
        raise NotImplementedError

    def quad_points(self) -> list[float]:
        """Interior break points that help the adaptive quadrature."""
        return [0.0]

    def spec_string(self) -> str:
        return f"{self.name}:{self.variance:g}"


def _gauss_pdf(s, sigma):
    return np.exp(-(s * s) / (2.0 * sigma * sigma)) / (sigma * math.sqrt(2.0 * math.pi))


def _gauss_cutoff(sigma: float) -> float:
    # Solve exp(-s^2 / 2 sigma^2) / (sigma sqrt(2 pi)) = DENSITY_FLOOR.
    return sigma * math.sqrt(-2.0 * math.log(DENSITY_FLOOR * sigma * math.sqrt(2.0 * math.pi)))


@dataclass(frozen=True)
class Gaussian(EntryDistribution):
    variance: float

    name = "gaussian"
    has_density = True

    @property
    def subgaussian_nu(self) -> float:
        # E exp(nu x^2) is finite for nu < 1/(2 variance); record half the cap.
        return 1.0 / (4.0 * self.variance)

    def density(self, s):
        return _gauss_pdf(np.asarray(s, dtype=float), math.sqrt(self.variance))

    def score(self, s):
        return -np.asarray(s, dtype=float) / self.variance

    def draw(self, rng, n):
        return rng.standard_normal(n) * math.sqrt(self.variance)

    def fourth_moment(self):
        return 3.0 * self.variance**2

    def quad_support(self):
        c = _gauss_cutoff(math.sqrt(self.variance))
        return (-c, c)


@dataclass(frozen=True)
class Uniform(EntryDistribution):
    variance: float

    name = "uniform"
    has_density = True
    # h is discontinuous at the support edges; h' is a distribution, so no
    # pointwise score is exposed and the score integral is reported divergent.
    score = None

    @property
    def half_width(self) -> float:
        return math.sqrt(3.0 * self.variance)

    @property
    def subgaussian_nu(self) -> float:
        return 1.0  # bounded support, any nu works

    def density(self, s):
        s = np.asarray(s, dtype=float)
        w = self.half_width
        return np.where(np.abs(s) <= w, 1.0 / (2.0 * w), 0.0)

    def draw(self, rng, n):
        w = self.half_width
        return rng.uniform(-w, w, n)

    def fourth_moment(self):
        return self.half_width**4 / 5.0

    def quad_support(self):
        return (-self.half_width, self.half_width)


@dataclass(frozen=True)
class Bernoulli(EntryDistribution):
    """Symmetric two-point law on {-sqrt(variance), +sqrt(variance)}.

    The canonical discrete negative control: with positive probability an
    eigenvalue can sit exactly at a fixed energy, so interval-probability
    bounds proportional to the interval length cannot hold uniformly.
    """

    variance: float

    name = "bernoulli"
    has_density = False

    @property
    def subgaussian_nu(self) -> float:
        return 1.0

    def draw(self, rng, n):
        return (2.0 * rng.integers(0, 2, n) - 1.0) * math.sqrt(self.variance)

    def fourth_moment(self):
        return self.variance**2


@dataclass(frozen=True)
class SmoothedBernoulli(EntryDistribution):
    """Bernoulli convolved with a centred Gaussian of width sigma_mix.

    Interpolates between the excluded discrete case (sigma_mix -> 0) and the
    smooth case.  Total variance = spike^2 + sigma_mix^2, so the spike sits at
    +/- sqrt(variance - sigma_mix^2).  Density and score are the closed-form
    two-Gaussian mixture expressions; the score is evaluated in log space so
    the far tail does not produce 0/0.
    """

    variance: float
    sigma_mix: float

    name = "smoothed_bernoulli"
    has_density = True

    def __post_init__(self):
        if not 0.0 < self.sigma_mix < math.sqrt(self.variance):
            raise InvalidSpecError(
                "smoothed_bernoulli requires 0 < sigma_mix < sqrt(variance), got "
                f"sigma_mix={self.sigma_mix} for variance={self.variance}"
            )

    @property
    def spike(self) -> float:
        return math.sqrt(self.variance - self.sigma_mix**2)

    @property
    def subgaussian_nu(self) -> float:
        return 1.0 / (4.0 * self.sigma_mix**2)

    def density(self, s):
        s = np.asarray(s, dtype=float)
        a, sig = self.spike, self.sigma_mix
        return 0.5 * (_gauss_pdf(s - a, sig) + _gauss_pdf(s + a, sig))

    def score(self, s):
        s = np.asarray(s, dtype=float)
        a, v = self.spike, self.sigma_mix**2
        lp = -((s - a) ** 2) / (2.0 * v)
        lm = -((s + a) ** 2) / (2.0 * v)
        top = np.maximum(lp, lm)
        wp = np.exp(lp - top)
        wm = np.exp(lm - top)
        return (-(s - a) * wp - (s + a) * wm) / (v * (wp + wm))

    def draw(self, rng, n):
        # Consumption order within the stream: n sign draws, then n normals.
        signs = 2.0 * rng.integers(0, 2, n) - 1.0
        return signs * self.spike + self.sigma_mix * rng.standard_normal(n)

    def fourth_moment(self):
        a2, v = self.spike**2, self.sigma_mix**2
        return a2 * a2 + 6.0 * a2 * v + 3.0 * v * v

    def quad_support(self):
        c = self.spike + _gauss_cutoff(self.sigma_mix)
        return (-c, c)

    def quad_points(self):
        return [-self.spike, 0.0, self.spike]

    def spec_string(self) -> str:
        return f"{self.name}:{self.variance:g}:{self.sigma_mix:g}"


def make_builtin(name: str, variance: float, sigma_mix: float | None = None) -> EntryDistribution:
    """Instantiate one of the built-in centred laws.

    ``sigma_mix`` is required for (and only for) ``smoothed_bernoulli``.
    """
    if variance <= 0:
        raise InvalidSpecError(f"variance must be positive, got {variance}")
    if name == "gaussian":
        return Gaussian(variance=float(variance))
    if name == "uniform":
        return Uniform(variance=float(variance))
    if name == "bernoulli":
        return Bernoulli(variance=float(variance))
    if name == "smoothed_bernoulli":
        if sigma_mix is None:
            raise InvalidSpecError("smoothed_bernoulli requires a sigma_mix parameter")
        return SmoothedBernoulli(variance=float(variance), sigma_mix=float(sigma_mix))
    raise InvalidSpecError(f"unknown law {name!r}; expected one of {BUILTIN_NAMES}")


@dataclass(frozen=True)
class ScoreIntegral:
    """Value of  integral (h'/h)^power h ds, or a divergence flag."""

    value: float
    diverged: bool
    error_estimate: float


def score_integral(d: EntryDistribution, power: int) -> ScoreIntegral:
    """Score-regularity functional of a law with a density.

    Raises NoDensityError for discrete laws (the estimate this gate guards is
    genuinely false for them).  Laws whose density is discontinuous carry no
    pointwise score; for those the integral is reported as divergent rather
    than silently zero.
    """
    if power not in (2, 4):
        raise InvalidSpecError(f"power must be 2 or 4, got {power}")
    if not d.has_density:
        raise NoDensityError(
            f"law {d.name!r} has no density; the score-regularity hypothesis is inapplicable"
        )
    if d.score is None:
        return ScoreIntegral(value=math.inf, diverged=True, error_estimate=math.inf)

    lo, hi = d.quad_support()

    def integrand(s):
        return float(d.score(s) ** power * d.density(s))

    pts = [p for p in d.quad_points() if lo < p < hi]
    value, err = integrate.quad(integrand, lo, hi, epsabs=QUAD_ABS_TOL, limit=400, points=pts)
    if not math.isfinite(value) or value > DIVERGENCE_CAP:
        return ScoreIntegral(value=math.inf, diverged=True, error_estimate=err)
    return ScoreIntegral(value=value, diverged=False, error_estimate=err)


def density_normalization(d: EntryDistribution) -> float:
    """Quadrature of h over its support (should be 1 for every density)."""
    if not d.has_density:
        raise NoDensityError(f"law {d.name!r} has no density")
    lo, hi = d.quad_support()
    pts = [p for p in d.quad_points() if lo < p < hi]
    value, _ = integrate.quad(lambda s: float(d.density(s)), lo, hi, epsabs=QUAD_ABS_TOL, limit=400, points=pts)
    return value


def sample(d: EntryDistribution, n: int, seed: int) -> np.ndarray:
    """Module-level alias for ``d.sample(n, seed)``."""
    return d.sample(n, seed)
