"""Exact samplers for the max-stable fields used in the simulation studies.

Max-stable sampling follows the extremal-functions construction: sites are
visited in turn and candidate spectral functions are drawn from the law of
the extremal function at the visited site, thinned against the running
record. This is exact for Brown-Resnick (space-time and spatial) and Smith
innovations. Schlather innovations use the truncated-spectral construction
with a compensating stopping rule (bound ``spectral_bound`` standard
deviations); the truncation bias is controlled and checked against the
closed-form extremal coefficients in the tests.

The space-time Brown-Resnick semivariogram is additive in space and time,
so the underlying intrinsic Gaussian process splits into independent spatial
and temporal factors; only the two factor covariances are ever factorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import BudgetExceeded, InvalidArgs, NonIntegerShift, NotPSD
from .fields import SpaceTimeField
from .lattice import GridSpec
from .models import (BRInnovation, BRParams, ExtremalTInnovation, Innovation,
                     SchlatherInnovation, SmithInnovation)


@dataclass
class SimConfig:
    """Reproducibility and numerical-control knobs for the samplers."""

    seed: int
    truncation_tol: float = 1e-6   # MAR unroll: delta^(J+1) <= tol
    max_unroll: int | None = None  # explicit J override
    jitter: float = 1e-10
    spectral_bound: float = 5.0    # Schlather spectral truncation (in sd)
    cholesky_budget: int = 4000

    def __post_init__(self):
        if self.jitter < 0:
            raise InvalidArgs("jitter must be nonnegative")
        if self.max_unroll is not None and self.max_unroll < 1:
            raise InvalidArgs("unroll depth J must be >= 1")


def child_seed(seed: int, *stream) -> int:
    """Derive an independent 32-bit stream seed from (seed, stream indices)."""
    return int(np.random.SeedSequence((seed,) + stream).generate_state(1)[0])


# ---------------------------------------------------------------------------
# Gaussian utilities
# ---------------------------------------------------------------------------

def _chol_jitter(C: np.ndarray, jitter: float) -> np.ndarray:
    eps = 0.0
    for _ in range(8):
        try:
            return np.linalg.cholesky(C + eps * np.eye(len(C)))
        except np.linalg.LinAlgError:
            eps = jitter if eps == 0.0 else eps * 10.0
            if jitter == 0.0:
                break
    raise NotPSD("covariance not positive semi-definite after jitter escalation")


def simulate_gaussian_field(gamma, sites, seed: int, *,
                            jitter: float = 1e-10,
                            budget: int = 4000) -> np.ndarray:
    """Centered Gaussian draw with stationary increments, anchored at the origin.

    ``gamma`` maps difference vectors (..., d) to semivariogram values; the
    covariance is gamma(p) + gamma(q) - gamma(p - q), so the variance at p is
    2*gamma(p) and the process is exactly 0 at the origin.
    """
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    N = len(sites)
    if N > budget:
        raise BudgetExceeded(f"{N} sites exceed the dense-factorization budget {budget}")
    g0 = np.asarray(gamma(sites), dtype=float)
    diffs = sites[:, None, :] - sites[None, :, :]
    C = g0[:, None] + g0[None, :] - np.asarray(gamma(diffs), dtype=float)
    out = np.zeros(N)
    live = np.diag(C) > 1e-14
    if live.any():
        L = _chol_jitter(C[np.ix_(live, live)], jitter)
        rng = np.random.default_rng(seed)
        out[live] = L @ rng.standard_normal(live.sum())
    return out


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _extremal_additive_kernel(Ls, Lt, Gs, Gt, si, ti, seed):  # pragma: no cover
    """Extremal-functions sampler for log-Gaussian spectral processes.

    The intrinsic Gaussian process is eps(s, t) = eps_s(s) + eps_t(t) with
    factor Cholesky roots Ls, Lt and semivariogram matrices Gs, Gt. A purely
    spatial process is the special case nt == 1 with zero temporal factor.
    Returns the unit-Frechet max-stable field on the product site set.
    """
    np.random.seed(seed)
    N = si.shape[0]
    ns = Ls.shape[0]
    nt = Lt.shape[0]
    Z = np.zeros(N)
    for k in range(N):
        sk = si[k]
        tk = ti[k]
        gam = np.random.exponential()
        while 1.0 / gam > Z[k]:
            es = Ls @ np.random.standard_normal(ns)
            et = Lt @ np.random.standard_normal(nt)
            ek = es[sk] + et[tk]
            ok = True
            for m in range(k):
                y = math.exp(es[si[m]] + et[ti[m]] - ek
                             - Gs[sk, si[m]] - Gt[tk, ti[m]]) / gam
                if y >= Z[m]:
                    ok = False
                    break
            if ok:
                for m in range(N):
                    y = math.exp(es[si[m]] + et[ti[m]] - ek
                                 - Gs[sk, si[m]] - Gt[tk, ti[m]]) / gam
                    if y > Z[m]:
                        Z[m] = y
            gam += np.random.exponential()
    return Z


@njit(cache=True)
def _smith_extremal_kernel(coords, A, Sinv, seed):  # pragma: no cover
    """Extremal-functions sampler for the Smith storm-profile process.

    The extremal function at site s has storm center U ~ N(s, Sigma) and
    profile ratio Y(x) = phi(x - U) / phi(s - U); A is chol(Sigma).
    """
    np.random.seed(seed)
    N = coords.shape[0]
    Z = np.zeros(N)
    for k in range(N):
        gam = np.random.exponential()
        while 1.0 / gam > Z[k]:
            z0 = np.random.standard_normal()
            z1 = np.random.standard_normal()
            ux = coords[k, 0] + A[0, 0] * z0
            uy = coords[k, 1] + A[1, 0] * z0 + A[1, 1] * z1
            dx = coords[k, 0] - ux
            dy = coords[k, 1] - uy
            qk = Sinv[0, 0] * dx * dx + 2.0 * Sinv[0, 1] * dx * dy \
                + Sinv[1, 1] * dy * dy
            ok = True
            for m in range(k):
                dx = coords[m, 0] - ux
                dy = coords[m, 1] - uy
                q = Sinv[0, 0] * dx * dx + 2.0 * Sinv[0, 1] * dx * dy \
                    + Sinv[1, 1] * dy * dy
                if math.exp(-0.5 * (q - qk)) / gam >= Z[m]:
                    ok = False
                    break
            if ok:
                for m in range(N):
                    dx = coords[m, 0] - ux
                    dy = coords[m, 1] - uy
                    q = Sinv[0, 0] * dx * dx + 2.0 * Sinv[0, 1] * dx * dy \
                        + Sinv[1, 1] * dy * dy
                    y = math.exp(-0.5 * (q - qk)) / gam
                    if y > Z[m]:
                        Z[m] = y
            gam += np.random.exponential()
    return Z


@njit(cache=True)
def _schlather_spectral_kernel(L, bound, seed):  # pragma: no cover
    """Truncated-spectral sampler: X = max_i (1/Gamma_i) sqrt(2*pi) max(0, W_i).

    Stops once sqrt(2*pi)*bound / Gamma drops below the running minimum, so
    only spectral events with sup W > bound can be missed.
    """
    np.random.seed(seed)
    N = L.shape[0]
    Z = np.zeros(N)
    c = math.sqrt(2.0 * math.pi)
    gam = np.random.exponential()
    while True:
        minz = Z[0]
        for m in range(1, N):
            if Z[m] < minz:
                minz = Z[m]
        if minz > 0.0 and c * bound / gam <= minz:
            break
        w = L @ np.random.standard_normal(N)
        for m in range(N):
            y = c * max(0.0, w[m]) / gam
            if y > Z[m]:
                Z[m] = y
        gam += np.random.exponential()
    return Z


# ---------------------------------------------------------------------------
# space-time Brown-Resnick
# ---------------------------------------------------------------------------

def _grid_coords(n: int) -> np.ndarray:
    x, y = np.meshgrid(np.arange(1, n + 1), np.arange(1, n + 1), indexing="ij")
    return np.column_stack([x.ravel(), y.ravel()]).astype(float)


def _pairwise_dist(coords: np.ndarray) -> np.ndarray:
    d = coords[:, None, :] - coords[None, :, :]
    return np.sqrt((d ** 2).sum(axis=-1))


def _anchored_cov(G: np.ndarray) -> np.ndarray:
    """Covariance of the intrinsic process anchored at the first site."""
    g0 = G[0]
    return g0[:, None] + g0[None, :] - G


def simulate_br(p: BRParams, grid: GridSpec, T: int, cfg: SimConfig) -> SpaceTimeField:
    """Exact space-time Brown-Resnick sample with unit Frechet margins."""
    if T < 1:
        raise InvalidArgs("T must be >= 1")
    ns = grid.nsites
    if max(ns, T) > cfg.cholesky_budget:
        raise BudgetExceeded(
            f"factor sizes ({ns}, {T}) exceed budget {cfg.cholesky_budget}")
    coords = _grid_coords(grid.n)
    Gs = 2.0 * p.phi_s * _pairwise_dist(coords) ** p.kappa_s
    dt = np.abs(np.arange(T)[:, None] - np.arange(T)[None, :]).astype(float)
    Gt = 2.0 * p.phi_t * dt ** p.kappa_t
    Ls = _chol_jitter(_anchored_cov(Gs), cfg.jitter)
    Lt = _chol_jitter(_anchored_cov(Gt), cfg.jitter)
    si = np.repeat(np.arange(ns), T)
    ti = np.tile(np.arange(T), ns)
    Z = _extremal_additive_kernel(Ls, Lt, Gs, Gt, si, ti,
                                  child_seed(cfg.seed, 0))
    return SpaceTimeField(n=grid.n, T=T,
                          values=Z.reshape(grid.n, grid.n, T),
                          margins="frechet")


# ---------------------------------------------------------------------------
# spatial innovations
# ---------------------------------------------------------------------------

def _window_coords(window) -> tuple[np.ndarray, int, int]:
    (x_lo, x_hi), (y_lo, y_hi) = window
    if x_hi < x_lo or y_hi < y_lo:
        raise InvalidArgs("empty window")
    xs = np.arange(x_lo, x_hi + 1)
    ys = np.arange(y_lo, y_hi + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return (np.column_stack([X.ravel(), Y.ravel()]).astype(float),
            len(xs), len(ys))


def _innovation_sampler(kind: Innovation, coords: np.ndarray, cfg: SimConfig):
    """One-off setup returning seed -> flat unit-Frechet field on coords."""
    N = len(coords)
    if isinstance(kind, SmithInnovation):
        A = np.linalg.cholesky(kind.sigma)
        Sinv = kind.sigma_inv
        return lambda seed: _smith_extremal_kernel(coords, A, Sinv, seed)
    if N > cfg.cholesky_budget:
        raise BudgetExceeded(
            f"{N} window sites exceed budget {cfg.cholesky_budget}")
    if isinstance(kind, BRInnovation):
        G = (_pairwise_dist(coords) / kind.phi) ** kind.kappa
        L = _chol_jitter(_anchored_cov(G), cfg.jitter)
        Lt = np.zeros((1, 1))
        Gt = np.zeros((1, 1))
        si = np.arange(N)
        ti = np.zeros(N, dtype=np.int64)
        return lambda seed: _extremal_additive_kernel(L, Lt, G, Gt, si, ti, seed)
    if isinstance(kind, SchlatherInnovation):
        R = np.exp(-(_pairwise_dist(coords) / kind.phi) ** kind.kappa)
        L = _chol_jitter(R, max(cfg.jitter, 1e-12))
        bound = cfg.spectral_bound
        return lambda seed: _schlather_spectral_kernel(L, bound, seed)
    if isinstance(kind, ExtremalTInnovation):
        raise InvalidArgs("extremal-t innovations are fit-only, not simulated")
    raise InvalidArgs(f"unknown innovation kind {type(kind).__name__}")


def simulate_spatial_innovation(kind: Innovation, window, seed: int,
                                cfg: SimConfig | None = None) -> np.ndarray:
    """Unit-Frechet spatial innovation field on an integer-lattice window.

    ``window`` is ((x_lo, x_hi), (y_lo, y_hi)), bounds inclusive. Returns an
    (nx, ny) array.
    """
    cfg = cfg or SimConfig(seed=seed)
    coords, nx, ny = _window_coords(window)
    sampler = _innovation_sampler(kind, coords, cfg)
    return sampler(seed & 0xFFFFFFFF).reshape(nx, ny)


# ---------------------------------------------------------------------------
# max-autoregression
# ---------------------------------------------------------------------------

def mar_unroll_depth(delta: float, cfg: SimConfig) -> int:
    """Smallest J >= 1 with delta^(J+1) <= cfg.truncation_tol."""
    if cfg.max_unroll is not None:
        return cfg.max_unroll
    return max(1, math.ceil(math.log(cfg.truncation_tol) / math.log(delta)) - 1)


def simulate_mar(kind: Innovation, tau, delta: float, grid: GridSpec, T: int,
                 cfg: SimConfig, return_innovations: bool = False):
    """Truncated moving-maxima sample of the max-autoregressive field.

    X(s, t) = max_{j=0..J} delta^j (1-delta) H(s - j*tau, t - j) with i.i.d.
    spatial innovations H on the window enlarged by the unrolled shifts; the
    marginal exponent is 1 - delta^(J+1) (truncation bias).
    """
    if not 0 < delta < 1:
        raise InvalidArgs("delta must lie in (0, 1)")
    tau = np.asarray(tau, dtype=float)
    if tau.shape != (2,) or np.any(tau != np.round(tau)):
        raise NonIntegerShift(f"tau must have integer components, got {tau}")
    tx, ty = int(tau[0]), int(tau[1])
    n = grid.n
    J = mar_unroll_depth(delta, cfg)
    x_lo, x_hi = 1 - J * max(0, tx), n + J * max(0, -tx)
    y_lo, y_hi = 1 - J * max(0, ty), n + J * max(0, -ty)
    coords, nx, ny = _window_coords(((x_lo, x_hi), (y_lo, y_hi)))
    sampler = _innovation_sampler(kind, coords, cfg)
    n_fields = T + J  # innovation times 1-J .. T
    H = np.empty((n_fields, nx, ny))
    for k in range(n_fields):
        H[k] = sampler(child_seed(cfg.seed, 1, k)).reshape(nx, ny)
    weights = (1.0 - delta) * delta ** np.arange(J + 1)
    X = np.zeros((n, n, T))
    for t in range(1, T + 1):
        acc = X[:, :, t - 1]
        for j in range(J + 1):
            k = t - j + J - 1  # innovation time t-j at array index
            ix = 1 - j * tx - x_lo
            iy = 1 - j * ty - y_lo
            np.maximum(acc, weights[j] * H[k, ix:ix + n, iy:iy + n], out=acc)
    field = SpaceTimeField(n=n, T=T, values=X, margins="frechet")
    if return_innovations:
        return field, {"H": H, "J": J, "x_lo": x_lo, "y_lo": y_lo,
                       "weights": weights}
    return field
