"""Special functions and generic numerical routines used by every bound.

Everything here is pure and reentrant: no shared mutable state, safe for
concurrent use.  Special functions delegate to scipy.special (double
precision, accepts scalars or arrays); the quadrature and the bounded
simplex search are implemented here because they carry contracts the
generic library routines do not (breakpoint-aligned panels with a
doubling convergence certificate, jittered multi-start with box
projection).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.optimize as _opt
import scipy.special as _sp

from .errors import (
    DomainError,
    MaxIterationsError,
    NonConvergentError,
    NoSignChangeError,
)

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


class Bracket(NamedTuple):
    """An interval [lo, hi] with lo < hi; for root finding the endpoints must
    straddle a sign change."""

    lo: float
    hi: float


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls Gaussian-weight quadrature.

    half_width is measured in standard deviations of the N(0,1) weight; the
    integral is truncated to [-half_width, half_width].  Callers integrating
    growing exponentials must widen the window so the full integrand has
    decayed at the cut (see gauss_expectation's precondition).
    """

    half_width: float = 10.0
    panels: int = 64
    rel_tol: float = 1e-9
    max_panels: int = 16384

    def __post_init__(self):
        if self.half_width < 6:
            raise DomainError("half_width must be >= 6 standard deviations")
        if self.panels < 64:
            raise DomainError("panels must be >= 64")
        if self.rel_tol <= 0:
            raise DomainError("rel_tol must be positive")


def erf(x):
    """Error function, |error| <= 1e-14 on finite reals; exactly odd."""
    return _sp.erf(x)


def erfc(x):
    """Complementary error function 1 - erf(x), computed without cancellation."""
    return _sp.erfc(x)


def erfcx(x):
    """Scaled complementary error function exp(x**2) * erfc(x)."""
    return _sp.erfcx(x)


def erfinv(p):
    """Inverse of erf on (-1, 1).

    Raises DomainError for |p| >= 1 (the spec of this routine is total only
    on the open interval; infinities are never returned).
    """
    arr = np.asarray(p, dtype=float)
    if np.any(np.abs(arr) >= 1.0):
        raise DomainError("erfinv requires |p| < 1")
    out = _sp.erfinv(arr)
    return float(out) if np.isscalar(p) or arr.ndim == 0 else out


def find_root(f: Callable[[float], float], bracket: Bracket, tol: float = 1e-10) -> float:
    """Root of a continuous scalar function inside a sign-changing bracket.

    Brent's method: bisection with inverse-quadratic acceleration, never
    leaves the bracket.  Raises NoSignChangeError when f(lo) and f(hi) have
    the same (nonzero) sign.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise DomainError(f"bracket must satisfy lo < hi, got ({lo}, {hi})")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise NoSignChangeError(
            f"f has the same sign at both bracket ends: f({lo})={flo:.3e}, f({hi})={fhi:.3e}"
        )
    return float(_opt.brentq(f, lo, hi, xtol=tol, maxiter=300))


def _jitter_seeds(x0, bounds, restarts, rng):
    """x0 plus `restarts` jittered copies, all projected into the box."""
    x0 = np.asarray(x0, dtype=float)
    seeds = [x0]
    if bounds is None:
        scale = 0.1 * (np.abs(x0) + 1.0)
        lo = np.full_like(x0, -np.inf)
        hi = np.full_like(x0, np.inf)
    else:
        lo = np.array([-np.inf if b[0] is None else b[0] for b in bounds])
        hi = np.array([np.inf if b[1] is None else b[1] for b in bounds])
        width = np.where(np.isfinite(hi - lo), hi - lo, 2.0 * (np.abs(x0) + 1.0))
        scale = 0.05 * width
    for _ in range(restarts):
        seeds.append(np.clip(x0 + scale * rng.standard_normal(x0.size), lo, hi))
    return seeds


def minimize_local(
    f: Callable[[np.ndarray], float],
    x0,
    bounds: Sequence[tuple] | None = None,
    tol: float = 1e-8,
    max_iter: int = 4000,
    restarts: int = 3,
    seed: int = 0,
) -> tuple[np.ndarray, float]:
    """Derivative-free local minimization over a box.

    Nelder-Mead simplex with box projection, restarted from `restarts`
    jittered copies of x0; the best point across restarts is returned.
    Raises MaxIterationsError if every restart exhausted `max_iter`
    iterations without meeting the simplex tolerance.
    """
    rng = np.random.default_rng(seed)
    best_x, best_f = None, np.inf
    any_converged = False
    for start in _jitter_seeds(x0, bounds, restarts, rng):
        res = _opt.minimize(
            f,
            start,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "xatol": tol,
                "fatol": tol * 1e-2,
                "maxiter": max_iter,
                "maxfev": max_iter,
            },
        )
        any_converged = any_converged or bool(res.success)
        if res.fun < best_f:
            best_x, best_f = res.x, float(res.fun)
    if not any_converged:
        raise MaxIterationsError(
            f"no Nelder-Mead restart converged within {max_iter} iterations"
        )
    return np.asarray(best_x), best_f


def gaussian_quadratic_integral(p: float, s: float, c: float, lo: float, hi: float) -> float:
    """Exact integral of exp(p*h**2 + s*h + c) against the N(0,1) density on [lo, hi].

    Requires p < 1/2.  Completing the square gives
        e^E / (2*sqrt(1-2p)) * (erfc(z(lo)) - erfc(z(hi))),
        a = 1/2 - p,  mu = s/(2a),  z(x) = (x-mu)*sqrt(a),  E = a*mu**2 + c,
    evaluated through erfcx so that huge e^E against tiny erfc never overflows
    when the true value is moderate.  lo/hi may be +-inf.
    """
    a = 0.5 - p
    if a <= 0:
        raise DomainError("gaussian_quadratic_integral requires p < 1/2")
    if hi <= lo:
        return 0.0
    mu = s / (2.0 * a)
    sqrt_a = math.sqrt(a)
    E = a * mu * mu + c
    norm = 2.0 * math.sqrt(1.0 - 2.0 * p)

    def _exp(x):
        # saturating exp: overflow means the integral itself is huge
        return math.exp(x) if x < 709.0 else math.inf

    def _exponent(x):
        # log of the full integrand (up to the 1/sqrt(2pi)); equals E - z(x)^2
        return (p - 0.5) * x * x + s * x + c

    def _tail(x):
        # e^E * erfc(z(x)) for z(x) >= 0, overflow-free
        return float(_sp.erfcx((x - mu) * sqrt_a)) * _exp(_exponent(x))

    z_lo = -np.inf if lo == -np.inf else (lo - mu) * sqrt_a
    z_hi = np.inf if hi == np.inf else (hi - mu) * sqrt_a
    if z_lo >= 0:
        upper = 0.0 if z_hi == np.inf else _tail(hi)
        return (_tail(lo) - upper) / norm
    if z_hi <= 0:
        lower = 0.0 if z_lo == -np.inf else _exp(_exponent(lo)) * float(_sp.erfcx(-z_lo))
        return (_exp(_exponent(hi)) * float(_sp.erfcx(-z_hi)) - lower) / norm
    # window straddles the peak: the e^E mass is genuinely present
    lower = 0.0 if z_lo == -np.inf else _exp(_exponent(lo)) * float(_sp.erfcx(-z_lo))
    upper = 0.0 if z_hi == np.inf else _tail(hi)
    return (2.0 * _exp(E) - lower - upper) / norm


_GL_ORDER = 16
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


def _composite_gl(f, segments, panels_per_unit):
    """Composite Gauss-Legendre sum of f over the given segments.

    Panels are distributed proportionally to segment length (at least one
    per segment) so that panel edges always sit on segment boundaries.
    """
    total = 0.0
    span = sum(hi - lo for lo, hi in segments)
    for lo, hi in segments:
        n_pan = max(1, int(round(panels_per_unit * (hi - lo) / span)))
        edges = np.linspace(lo, hi, n_pan + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        # nodes: (n_pan, order)
        nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        vals = f(nodes.ravel()).reshape(nodes.shape)
        total += float(np.sum(half[:, None] * _GL_WEIGHTS[None, :] * vals))
    return total


def gauss_expectation(
    g: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec | None = None,
    breakpoints: Sequence[float] = (),
    g_is_log: bool = False,
) -> float:
    """E[g(h)] for h ~ N(0,1), by breakpoint-aligned composite quadrature.

    g must be vectorized and integrable against the standard normal density;
    the caller guarantees that g(h)*exp(-h**2/2) has decayed at
    +-spec.half_width (for exponential-moment integrands this is the
    b < 1/2 style constraint plus a wide enough window).  Panel counts are
    doubled until two successive estimates agree to spec.rel_tol relative;
    NonConvergentError is raised if the doubling cap is reached first.

    With g_is_log=True, g returns log-values and E[exp(g(h))] is computed;
    the exponents are combined with the Gaussian weight before
    exponentiating, so integrands that overflow pointwise but are tamed by
    the weight evaluate cleanly.
    """
    spec = spec or QuadratureSpec()
    hw = spec.half_width
    cuts = sorted({-hw, hw, *(float(b) for b in breakpoints if -hw < float(b) < hw)})
    segments = list(zip(cuts[:-1], cuts[1:]))

    if g_is_log:
        def weighted(h):
            return np.exp(g(h) - 0.5 * h * h) / SQRT2PI
    else:
        def weighted(h):
            return g(h) * np.exp(-0.5 * h * h) / SQRT2PI

    panels = spec.panels
    prev = None
    while panels <= spec.max_panels:
        est = _composite_gl(weighted, segments, panels)
        if prev is not None and abs(est - prev) <= spec.rel_tol * max(abs(est), 1e-12):
            return est
        prev = est
        panels *= 2
    delta = "n/a" if prev is None else f"{abs(est - prev):.3e}"
    raise NonConvergentError(
        f"quadrature did not stabilize to rel_tol={spec.rel_tol} "
        f"within {spec.max_panels} panels (last delta {delta})"
    )
