"""Graph-signal filtering: exact, transform-based, and polynomial.

A filter is a per-frequency gain profile applied in an eigenbasis of the
Laplacian. Three realizations are provided:

* exact: y = U H U^T x with the true eigenbasis,
* approximate: the same sandwich through an FGFT (forward, scale, inverse),
* polynomial: y = sum_i alpha_i L^i x, never touching any eigenbasis.

Low-pass and tabulated profiles are indexed by eigenvalue rank; the
exponential profile is evaluated at eigenvalue locations (true or
estimated, whichever basis is in play).
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Mapping, Sequence

import numpy as np

from fgft.diagonalize import exact_eigh
from fgft.transform import FGFT, forward, inverse

__all__ = [
    "FilterSpec",
    "PolyFilter",
    "filter_exact",
    "filter_fgft",
    "fit_poly",
    "apply_poly",
    "poly_rcg",
    "filter_op_error",
    "denoise_experiment",
]

FIT_GRID_POINTS = 2001


@dataclasses.dataclass(frozen=True)
class FilterSpec:
    """Frequency response of a graph filter.

    kind is one of "ideal-lowpass" (keep the first ``r`` frequencies),
    "exponential" (gain exp(-rate * lambda)), or "tabulated" (explicit
    per-rank gain vector). Use the classmethod constructors.
    """

    kind: str
    r: int | None = None
    rate: float | None = None
    h: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "ideal-lowpass":
            if self.r is None or self.r < 0:
                raise ValueError("ideal-lowpass needs a cut index r >= 0")
        elif self.kind == "exponential":
            if self.rate is None or not math.isfinite(self.rate):
                raise ValueError("exponential needs a finite rate")
        elif self.kind == "tabulated":
            if self.h is None:
                raise ValueError("tabulated needs a gain vector")
            h = np.asarray(self.h, dtype=np.float64)
            if h.ndim != 1 or h.size == 0:
                raise ValueError("tabulated gains must be a non-empty vector")
            if not np.all(np.isfinite(h)):
                raise ValueError("tabulated gains must be finite")
            h.flags.writeable = False
            object.__setattr__(self, "h", h)
        else:
            raise ValueError(f"unknown filter kind {self.kind!r}")

    @classmethod
    def ideal_lowpass(cls, r: int) -> "FilterSpec":
        """Keep the ``r`` lowest frequencies, zero out the rest."""
        return cls(kind="ideal-lowpass", r=int(r))

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "FilterSpec":
        """Heat-kernel style response exp(-rate * lambda)."""
        return cls(kind="exponential", rate=float(rate))

    @classmethod
    def tabulated(cls, h) -> "FilterSpec":
        """Explicit gain for each eigenvalue rank."""
        return cls(kind="tabulated", h=np.asarray(h, dtype=np.float64))

    def gains(self, lam: np.ndarray) -> np.ndarray:
        """Per-rank gain vector for an ascending eigenvalue vector ``lam``.

        Rank-indexed kinds (ideal-lowpass, tabulated) use only len(lam);
        the exponential kind evaluates its response at the given values,
        so feeding estimated eigenvalues yields the matching approximate
        gains.
        """
        lam = np.asarray(lam, dtype=np.float64)
        n = lam.shape[0]
        if self.kind == "ideal-lowpass":
            if self.r > n:
                raise ValueError(f"cut index {self.r} exceeds size {n}")
            return (np.arange(n) < self.r).astype(np.float64)
        if self.kind == "exponential":
            return np.exp(-self.rate * lam)
        if self.h.shape[0] != n:
            raise ValueError(
                f"tabulated gains have length {self.h.shape[0]}, need {n}"
            )
        return np.array(self.h, dtype=np.float64, copy=True)

    def response(self, lam: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
        """Continuous gain function h(lambda), for polynomial fitting.

        ``lam`` is the ascending exact spectrum; rank-indexed kinds need it
        to place their features on the eigenvalue axis. The low-pass
        discontinuity sits at the midpoint between the last kept and first
        dropped eigenvalue. Tabulated profiles interpolate linearly
        between eigenvalue locations.
        """
        lam = np.asarray(lam, dtype=np.float64)
        n = lam.shape[0]
        if self.kind == "exponential":
            rate = self.rate
            return lambda x: np.exp(-rate * np.asarray(x, dtype=np.float64))
        if self.kind == "ideal-lowpass":
            if self.r > n:
                raise ValueError(f"cut index {self.r} exceeds size {n}")
            if self.r == 0:
                return lambda x: np.zeros_like(np.asarray(x, dtype=np.float64))
            if self.r == n:
                return lambda x: np.ones_like(np.asarray(x, dtype=np.float64))
            cut = 0.5 * (lam[self.r - 1] + lam[self.r])
            return lambda x: (np.asarray(x, dtype=np.float64) < cut).astype(
                np.float64
            )
        if self.h.shape[0] != n:
            raise ValueError(
                f"tabulated gains have length {self.h.shape[0]}, need {n}"
            )
        xp, hp = lam, self.h
        return lambda x: np.interp(np.asarray(x, dtype=np.float64), xp, hp)


@dataclasses.dataclass(frozen=True)
class PolyFilter:
    """Polynomial filter sum_i coeffs[i] * L^i on the interval [0, lambda_max].

    ``coeffs`` are monomial coefficients, constant term first. When the
    filter came out of fit_poly, ``cheb`` additionally holds the Chebyshev
    series on [0, lambda_max]; application then uses the three-term
    recurrence, which is numerically stabler than Horner at high degree.
    ``fit_residual`` is the sup-norm fit error on the sampling grid.
    """

    coeffs: np.ndarray
    lambda_max: float
    cheb: np.ndarray | None = None
    fit_residual: float = 0.0

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("coeffs must be a non-empty vector")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        if not (self.lambda_max > 0):
            raise ValueError("lambda_max must be positive")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        if self.cheb is not None:
            cheb = np.asarray(self.cheb, dtype=np.float64)
            if cheb.ndim != 1 or not np.all(np.isfinite(cheb)):
                raise ValueError("Chebyshev coefficients must be finite")
            cheb.flags.writeable = False
            object.__setattr__(self, "cheb", cheb)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1


def filter_exact(l: np.ndarray, spec: FilterSpec, x: np.ndarray, eig=None):
    """Ground-truth filtering y = U H U^T x through the exact eigenbasis.

    Args:
        l: symmetric matrix (n, n).
        spec: frequency response.
        x: signal, shape (n,) or (n, m).
        eig: optional precomputed (eigenvalues, eigenvectors) pair to
            amortize the dense decomposition across calls.

    Returns:
        Filtered signal with the shape of x.
    """
    l = np.asarray(l, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != l.shape[0]:
        raise ValueError("signal length does not match the matrix size")
    if eig is None:
        lam, u = exact_eigh(l)
    else:
        lam, u = eig
    g = spec.gains(lam)
    coeff = u.T @ x
    coeff = coeff * (g if x.ndim == 1 else g[:, None])
    return u @ coeff


def filter_fgft(f: FGFT, spec: FilterSpec, x: np.ndarray) -> np.ndarray:
    """Approximate filtering through the fast transform.

    Runs forward, scales each coefficient by the gain at its estimated
    frequency, runs inverse. Costs two chain applications plus n
    multiplies.
    """
    g = spec.gains(f.lambda_hat)
    y = forward(f, x)
    y = y * (g if y.ndim == 1 else g[:, None])
    return inverse(f, y)


def fit_poly(h: Callable[[np.ndarray], np.ndarray], degree: int,
             lambda_max: float) -> PolyFilter:
    """Least-squares polynomial approximation of a response on [0, lambda_max].

    Fits a degree-``degree`` Chebyshev series to ``h`` sampled on a dense
    uniform grid, then also converts it to monomial form. Returns a
    PolyFilter carrying both representations and the grid sup-norm
    residual.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if not (lambda_max > 0):
        raise ValueError("lambda_max must be positive")
    xs = np.linspace(0.0, lambda_max, FIT_GRID_POINTS)
    ys = np.asarray(h(xs), dtype=np.float64)
    if ys.shape != xs.shape:
        raise ValueError("response must map a grid to same-length values")
    dom = [0.0, float(lambda_max)]
    series = np.polynomial.Chebyshev.fit(xs, ys, deg=degree, domain=dom)
    # domain == window makes the conversion the identity map, so the
    # Polynomial coefficients are plain monomial coefficients in lambda.
    mono = series.convert(domain=dom, kind=np.polynomial.Polynomial,
                          window=dom)
    coeffs = np.zeros(degree + 1)
    coeffs[: mono.coef.shape[0]] = mono.coef
    resid = float(np.max(np.abs(series(xs) - ys)))
    return PolyFilter(coeffs=coeffs, lambda_max=float(lambda_max),
                      cheb=np.array(series.coef), fit_residual=resid)


def apply_poly(l, pf: PolyFilter, x: np.ndarray) -> np.ndarray:
    """Evaluate the polynomial filter on a signal with sparse mat-vecs.

    ``l`` may be a dense array or any object supporting ``l @ v``; degree
    p costs p products by l. Filters built by fit_poly run through the
    Chebyshev recurrence; hand-built monomial filters use Horner.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != l.shape[0]:
        raise ValueError("signal length does not match the matrix size")
    if pf.cheb is not None:
        scale = 2.0 / pf.lambda_max
        c = pf.cheb
        acc = c[0] * x
        if c.shape[0] > 1:
            t_prev = x
            t_cur = scale * (l @ x) - x
            acc = acc + c[1] * t_cur
            for ck in c[2:]:
                t_prev, t_cur = t_cur, 2.0 * (scale * (l @ t_cur) - t_cur) - t_prev
                acc = acc + ck * t_cur
        return acc
    a = pf.coeffs
    acc = a[-1] * x
    for ak in a[-2::-1]:
        acc = l @ acc + ak * x
    return acc


def poly_rcg(n: int, nnz_l: int, p: int) -> float:
    """Relative complexity gain of a degree-p polynomial filter.

    n^2 dense applications against p(nnz(L) + n) + n arithmetic
    operations for the recurrence.
    """
    if n <= 0 or nnz_l <= 0 or p < 0:
        raise ValueError("sizes must be positive and degree non-negative")
    return n * n / (p * (nnz_l + n) + n)


def filter_op_error(apply_hat: Callable[[np.ndarray], np.ndarray],
                    l: np.ndarray, spec: FilterSpec, eig=None) -> float:
    """Relative Frobenius distance between a filter operator and the truth.

    Densifies the candidate by applying it to the identity, builds the
    exact operator U H U^T from the true eigendecomposition, and returns
    ||G - G_hat||_F / ||G||_F.
    """
    l = np.asarray(l, dtype=np.float64)
    n = l.shape[0]
    if eig is None:
        lam, u = exact_eigh(l)
    else:
        lam, u = eig
    g = spec.gains(lam)
    g_exact = (u * g) @ u.T
    denom = float(np.linalg.norm(g_exact))
    if denom == 0.0:
        raise ValueError("exact filter operator is zero")
    g_hat = np.asarray(apply_hat(np.eye(n)), dtype=np.float64)
    if g_hat.shape != (n, n):
        raise ValueError("applier must map the identity to an (n, n) array")
    return float(np.linalg.norm(g_exact - g_hat)) / denom


def denoise_experiment(l: np.ndarray, spec: FilterSpec, sigma: float,
                       n_trials: int,
                       appliers: Mapping[str, Callable] | None = None,
                       seed: int = 0, eig=None) -> list:
    """Low-pass denoising benchmark; returns [(name, mean SNR dB), ...].

    Per trial: draw a random signal supported on the filter's passband
    (unit-variance spectral coefficients on the first r ranks), add white
    Gaussian noise of standard deviation sigma, then report the SNR of
    the noisy signal, of the exactly filtered signal, and of each
    candidate applier. ``appliers`` maps a row name to a callable taking
    and returning an (n, n_trials) signal block.
    """
    from fgft.metrics import snr_db

    if spec.kind != "ideal-lowpass":
        raise ValueError("denoising protocol needs an ideal-lowpass spec")
    if n_trials <= 0:
        raise ValueError("n_trials must be positive")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    l = np.asarray(l, dtype=np.float64)
    n = l.shape[0]
    if eig is None:
        lam, u = exact_eigh(l)
    else:
        lam, u = eig
    r = spec.r
    if not (0 < r <= n):
        raise ValueError("passband must be non-empty")
    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal((r, n_trials))
    clean = u[:, :r] @ coeff
    noisy = clean + sigma * rng.standard_normal((n, n_trials))

    def mean_snr(block: np.ndarray) -> float:
        vals = [snr_db(block[:, t], clean[:, t]) for t in range(n_trials)]
        if any(math.isinf(v) for v in vals):
            return math.inf if all(math.isinf(v) and v > 0 for v in vals) \
                else -math.inf
        return float(np.mean(vals))

    rows = [("noisy", mean_snr(noisy))]
    rows.append(("exact", mean_snr(filter_exact(l, spec, noisy,
                                                eig=(lam, u)))))
    for name, fn in (appliers or {}).items():
        rows.append((name, mean_snr(np.asarray(fn(noisy), dtype=np.float64))))
    return rows
