"""Eigenvalue spectra of Toeplitz covariances and their analytic oracles.

The numeric route is a dense symmetric eigensolver.  Three independent
routes exist to check it:

* closed-form eigenvalues of the tridiagonal (nearest-neighbour) family,
* the spectral density ``f(w) = sum_m rho_{|m|+1} exp(-i m w)``, whose range
  bounds every finite-n eigenvalue,
* Szego averages ``(1/pi) int_0^pi g(f(w)) dw``, the n -> infinity limit of
  ``(1/n) sum_i g(lambda_i)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.optimize

from .covariance import (
    CorrelationModel,
    CustomToeplitz,
    FirstOrderMarkov,
    Memoryless,
    NearestNeighbor,
    ToeplitzMatrix,
)
from .errors import InvalidParameter, NotPositiveDefinite, QuadratureFailure, Unsupported

__all__ = [
    "Spectrum",
    "eigenvalues",
    "tridiagonal_closed_form",
    "spectral_density",
    "density_range",
    "szego_average",
    "rate_function",
    "as_spectrum",
]

# eigenvalues in (-NEG_TOL * rho1, 0] are clipped up to FLOOR * rho1
NEG_TOL = 1e-10
FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues of one covariance matrix, sorted in descending order."""

    eigenvalues: np.ndarray
    tag: str = ""
    trace: float = field(default=float("nan"))

    def __post_init__(self):
        lam = np.sort(np.asarray(self.eigenvalues, dtype=float).ravel())[::-1].copy()
        if lam.size == 0:
            raise InvalidParameter("empty spectrum")
        if np.any(lam <= 0) or not np.all(np.isfinite(lam)):
            raise NotPositiveDefinite(f"spectrum {self.tag!r} has non-positive eigenvalues")
        lam.flags.writeable = False
        object.__setattr__(self, "eigenvalues", lam)
        if math.isnan(self.trace):
            object.__setattr__(self, "trace", float(lam.sum()))

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def max(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def min(self) -> float:
        return float(self.eigenvalues[-1])

    def mean(self) -> float:
        return float(self.eigenvalues.mean())

    def __len__(self):
        return self.n

    def __array__(self, dtype=None, copy=None):
        return np.array(self.eigenvalues, dtype=dtype)


def as_spectrum(spec) -> Spectrum:
    """Accept a :class:`Spectrum` or any sequence of positive values."""
    if isinstance(spec, Spectrum):
        return spec
    return Spectrum(np.asarray(spec, dtype=float))


def eigenvalues(matrix: ToeplitzMatrix) -> Spectrum:
    """Full eigenvalue spectrum of a symmetric positive-definite matrix.

    Eigenvalues that come out marginally negative (above ``-1e-10 * rho_1``)
    are clipped to ``1e-14 * rho_1`` with a warning; anything more negative
    raises :class:`NotPositiveDefinite`.
    """
    dense = np.asarray(matrix.dense if isinstance(matrix, ToeplitzMatrix) else matrix, dtype=float)
    tag = getattr(matrix, "tag", "")
    lam = scipy.linalg.eigvalsh(dense)[::-1].copy()
    scale = float(dense[0, 0])
    if lam[-1] <= -NEG_TOL * scale:
        raise NotPositiveDefinite(
            f"matrix {tag or '(unnamed)'} has eigenvalue {lam[-1]:.3e} <= 0"
        )
    bad = lam <= 0
    if np.any(bad):
        warnings.warn(
            f"clipping {int(bad.sum())} round-off eigenvalue(s) of {tag or 'matrix'} "
            f"to {FLOOR * scale:.1e}",
            RuntimeWarning,
            stacklevel=2,
        )
        lam[bad] = FLOOR * scale
    return Spectrum(lam, tag=tag, trace=float(np.trace(dense)))


def tridiagonal_closed_form(sigma2: float, n: int) -> Spectrum:
    """Eigenvalues ``sigma2 * (1 + cos(i pi / (n + 1)))``, ``i = 1..n``."""
    if n < 1 or sigma2 <= 0:
        raise InvalidParameter("need n >= 1 and sigma2 > 0")
    i = np.arange(1, n + 1)
    lam = sigma2 * (1.0 + np.cos(i * np.pi / (n + 1)))
    return Spectrum(lam, tag=f"tridiagonal_closed_form(sigma2={sigma2:g},n={n})")


def spectral_density(model: CorrelationModel, omega):
    """Power spectral density of the stationary sequence generated by ``model``.

    ``omega`` may be a scalar or an array of angular frequencies.
    """
    w = np.asarray(omega, dtype=float)
    if isinstance(model, Memoryless):
        out = np.full_like(w, model.sigma2)
    elif isinstance(model, NearestNeighbor):
        out = model.sigma2 * (1.0 + np.cos(w))
    elif isinstance(model, FirstOrderMarkov):
        g = abs(model.gamma)
        out = model.sigma2 * (1 - g * g) / (1 - 2 * g * np.cos(w) + g * g)
    elif isinstance(model, CustomToeplitz):
        rho = np.asarray(model.rho_values)
        m = np.arange(1, rho.size)
        out = rho[0] + 2.0 * np.cos(np.multiply.outer(w, m)) @ rho[1:]
    else:
        raise Unsupported(f"no spectral density for {type(model).__name__}")
    return float(out) if out.ndim == 0 else out


def density_range(model: CorrelationModel) -> tuple:
    """``(min f, max f)`` over ``[0, pi]``."""
    if isinstance(model, Memoryless):
        return model.sigma2, model.sigma2
    if isinstance(model, NearestNeighbor):
        return 0.0, 2.0 * model.sigma2
    if isinstance(model, FirstOrderMarkov):
        g = abs(model.gamma)
        return model.sigma2 * (1 - g) / (1 + g), model.sigma2 * (1 + g) / (1 - g)
    w = np.linspace(0.0, np.pi, 8193)
    f = spectral_density(model, w)
    lo = _refine_extremum(model, w, f, int(np.argmin(f)), 1.0)
    hi = -_refine_extremum(model, w, f, int(np.argmax(f)), -1.0)
    return lo, hi


def _refine_extremum(model, w, f, k, sign):
    a, b = w[max(k - 1, 0)], w[min(k + 1, w.size - 1)]
    res = scipy.optimize.minimize_scalar(
        lambda x: sign * spectral_density(model, x), bounds=(a, b), method="bounded",
        options={"xatol": 1e-12},
    )
    return min(sign * f[k], float(res.fun))


def rate_function(theta: float) -> Callable[[float], float]:
    """``g(x) = max(0, log2(x / theta) / 2)`` tagged with its kink at ``theta``."""

    def g(x):
        return max(0.0, 0.5 * math.log2(x / theta)) if x > 0 else 0.0

    g.kinks = (theta,)
    return g


def _level_crossings(model, levels) -> list:
    """Frequencies in (0, pi) where the density crosses one of ``levels``."""
    w = np.linspace(0.0, np.pi, 4097)
    f = spectral_density(model, w)
    out = []
    for y in levels:
        d = f - y
        for k in np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]:
            out.append(
                scipy.optimize.brentq(
                    lambda x: spectral_density(model, x) - y, w[k], w[k + 1], xtol=1e-14
                )
            )
        out.extend(float(w[k]) for k in np.nonzero(d == 0)[0] if 0 < w[k] < np.pi)
    return sorted(out)


def szego_average(model: CorrelationModel, g: Callable[[float], float], kinks: Sequence[float] = (),
                  tol: float = 1e-8) -> float:
    """``(1/pi) int_0^pi g(f(w)) dw`` by adaptive quadrature.

    Values where ``g`` is not smooth may be passed as ``kinks`` (or attached
    to ``g`` as a ``kinks`` attribute, as :func:`rate_function` does); the
    integration domain is split where the density crosses them.

    Raises
    ------
    QuadratureFailure
        If the error estimate exceeds ``tol`` on the average.
    """
    kinks = tuple(kinks) + tuple(getattr(g, "kinks", ()))
    points = _level_crossings(model, kinks) if kinks else []
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.integrate.IntegrationWarning)
        try:
            val, err = scipy.integrate.quad(
                lambda w: g(spectral_density(model, w)), 0.0, np.pi,
                points=points or None, limit=500, epsabs=tol * np.pi / 10, epsrel=1e-10,
            )
        except scipy.integrate.IntegrationWarning as exc:
            raise QuadratureFailure(str(exc)) from None
    if not err <= tol * np.pi:
        raise QuadratureFailure(f"quadrature error estimate {err / np.pi:.2e} exceeds {tol:.1e}")
    return val / np.pi
