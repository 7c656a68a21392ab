"""Closed-form dependence functions for the space-time max-stable families.

Families
--------
A1  space-time Brown-Resnick with additive fractional-Brownian semivariogram
A2  space-time Schlather with separable powered-exponential correlation
B1  max-autoregressive (MAR) with spatial Brown-Resnick innovations
B2  MAR with spatial Smith innovations (full 2x2 covariance)
B3  MAR with spatial extremal-t innovations
BS  MAR with spatial Schlather innovations (third simulation study)

All quantities are derived from the pairwise exponent function V(x1, x2) of
(X(s, t), X(s + h, t + l)); for the MAR class V composes the innovation's
spatial exponent at displacement u = h - l*tau with the autoregressive
discount delta**l.

``theta`` implements the explicit extremal-coefficient formulas;
``exponent_V`` implements the bivariate exponent functions. The two code
paths are kept separate on purpose so they can cross-check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import ndtr, stdtr

from .errors import InvalidArgs

__all__ = [
    "BRParams", "SepSchlatherParams", "SmithInnovation", "BRInnovation",
    "SchlatherInnovation", "ExtremalTInnovation", "MarParams", "ModelSpec",
    "fbm_semivariogram", "theta", "fmadogram_model", "exponent_V",
    "bivariate_cdf", "lambda_madogram", "theta_to_fmadogram",
    "fmadogram_to_theta", "model_to_dict", "model_from_dict",
]


# ---------------------------------------------------------------------------
# parameter containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BRParams:
    """FBM semivariogram parameters: gamma = 2*phi_s*h^kappa_s + 2*phi_t*l^kappa_t."""

    phi_s: float
    kappa_s: float
    phi_t: float
    kappa_t: float

    def __post_init__(self):
        if self.phi_s <= 0 or self.phi_t <= 0:
            raise InvalidArgs("scale parameters must be positive")
        if not (0 < self.kappa_s <= 2 and 0 < self.kappa_t <= 2):
            raise InvalidArgs("smoothness parameters must lie in (0, 2]")


@dataclass(frozen=True)
class SepSchlatherParams:
    """Separable correlation exp(-[(h/phi_s)^kappa_s + (l/phi_t)^kappa_t])."""

    phi_s: float
    kappa_s: float
    phi_t: float
    kappa_t: float

    def __post_init__(self):
        if self.phi_s <= 0 or self.phi_t <= 0:
            raise InvalidArgs("range parameters must be positive")
        if not (0 < self.kappa_s < 2 and 0 < self.kappa_t < 2):
            raise InvalidArgs("smoothness parameters must lie in (0, 2)")


@dataclass(frozen=True)
class SmithInnovation:
    """Smith storm-profile innovation with covariance [[s11, s12], [s12, s22]]."""

    sigma11: float
    sigma12: float
    sigma22: float

    def __post_init__(self):
        if self.sigma11 <= 0 or self.sigma22 <= 0:
            raise InvalidArgs("diagonal covariance entries must be positive")
        if self.det <= 0:
            raise InvalidArgs("innovation covariance must be positive definite")

    @property
    def det(self) -> float:
        return self.sigma11 * self.sigma22 - self.sigma12 ** 2

    @property
    def sigma(self) -> np.ndarray:
        return np.array([[self.sigma11, self.sigma12],
                         [self.sigma12, self.sigma22]])

    @property
    def sigma_inv(self) -> np.ndarray:
        return np.array([[self.sigma22, -self.sigma12],
                         [-self.sigma12, self.sigma11]]) / self.det


@dataclass(frozen=True)
class BRInnovation:
    """Spatial Brown-Resnick innovation, semivariogram (h/phi)^kappa."""

    phi: float
    kappa: float

    def __post_init__(self):
        if self.phi <= 0:
            raise InvalidArgs("range parameter must be positive")
        if not 0 < self.kappa <= 2:
            raise InvalidArgs("smoothness must lie in (0, 2]")


@dataclass(frozen=True)
class SchlatherInnovation:
    """Spatial Schlather innovation, correlation exp(-(h/phi)^kappa)."""

    phi: float
    kappa: float

    def __post_init__(self):
        if self.phi <= 0:
            raise InvalidArgs("range parameter must be positive")
        if not 0 < self.kappa < 2:
            raise InvalidArgs("smoothness must lie in (0, 2)")


@dataclass(frozen=True)
class ExtremalTInnovation:
    """Spatial extremal-t innovation: powered-exponential correlation, nu dof."""

    phi: float
    kappa: float
    nu: float

    def __post_init__(self):
        if self.phi <= 0:
            raise InvalidArgs("range parameter must be positive")
        if not 0 < self.kappa < 2:
            raise InvalidArgs("smoothness must lie in (0, 2)")
        if self.nu < 1:
            raise InvalidArgs("degrees of freedom must be >= 1")


Innovation = Union[SmithInnovation, BRInnovation, SchlatherInnovation,
                   ExtremalTInnovation]


@dataclass(frozen=True)
class MarParams:
    """Max-autoregression X(s,t) = max(delta*X(s-tau, t-1), (1-delta)*H(s,t))."""

    innovation: Innovation
    tau: tuple[float, float]
    delta: float

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise InvalidArgs("delta must lie strictly in (0, 1)")
        if len(self.tau) != 2:
            raise InvalidArgs("tau must be a 2-vector")


_FAMILY_PARAM_TYPE = {
    "A1": BRParams,
    "A2": SepSchlatherParams,
    "B1": MarParams,
    "B2": MarParams,
    "B3": MarParams,
    "BS": MarParams,
}
_FAMILY_INNOVATION = {
    "B1": BRInnovation,
    "B2": SmithInnovation,
    "B3": ExtremalTInnovation,
    "BS": SchlatherInnovation,
}


@dataclass(frozen=True)
class ModelSpec:
    """Tagged union over the model families."""

    family: str
    params: Union[BRParams, SepSchlatherParams, MarParams]

    def __post_init__(self):
        if self.family not in _FAMILY_PARAM_TYPE:
            raise InvalidArgs(f"unknown family {self.family!r}")
        if not isinstance(self.params, _FAMILY_PARAM_TYPE[self.family]):
            raise InvalidArgs(f"family {self.family} expects "
                              f"{_FAMILY_PARAM_TYPE[self.family].__name__}")
        if self.family in _FAMILY_INNOVATION and not isinstance(
                self.params.innovation, _FAMILY_INNOVATION[self.family]):
            raise InvalidArgs(f"family {self.family} expects "
                              f"{_FAMILY_INNOVATION[self.family].__name__} innovations")

    @property
    def is_mar(self) -> bool:
        return isinstance(self.params, MarParams)

    @property
    def n_spatial_params(self) -> int:
        return {"A1": 2, "A2": 2, "B1": 2, "B2": 3, "B3": 3, "BS": 2}[self.family]

    @property
    def n_temporal_params(self) -> int:
        return {"A1": 2, "A2": 2, "B1": 3, "B2": 3, "B3": 3, "BS": 3}[self.family]


# ---------------------------------------------------------------------------
# lag handling
# ---------------------------------------------------------------------------

def _needs_vector(m: ModelSpec, l: float) -> bool:
    # Anisotropy enters through Sigma (B2, any lag) or through h - l*tau
    # (any MAR family at l > 0).
    if m.family == "B2":
        return True
    return m.is_mar and l > 0


def _as_vec(h) -> np.ndarray:
    a = np.asarray(h, dtype=float)
    if a.shape == () or a.ndim == 0:
        return np.array([float(a), 0.0])
    if a.shape != (2,):
        raise InvalidArgs("spatial lag must be a scalar or a 2-vector")
    return a


def _resolve_lag(m: ModelSpec, h, l: float) -> np.ndarray:
    """Return the spatial displacement as a 2-vector, validating vector needs."""
    a = np.asarray(h, dtype=float)
    scalar = a.ndim == 0
    if scalar and float(a) != 0.0 and _needs_vector(m, l):
        raise InvalidArgs(
            f"family {m.family} is anisotropic at this lag; pass a 2-vector h")
    return _as_vec(h)


def _check_time_lag(l: float) -> float:
    if l < 0:
        raise InvalidArgs("temporal lag must be nonnegative")
    return float(l)


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------

def fbm_semivariogram(h: float, l: float, p: BRParams) -> float:
    """Additive fractional-Brownian space-time semivariogram."""
    h = float(np.linalg.norm(_as_vec(h)))
    l = _check_time_lag(l)
    return 2.0 * p.phi_s * h ** p.kappa_s + 2.0 * p.phi_t * l ** p.kappa_t


def _pow_exp_corr(dist, phi, kappa):
    return np.exp(-np.power(np.asarray(dist, dtype=float) / phi, kappa))


def _theta_husler(b, log_disc):
    """theta-type sum Phi(b/2 + c/b) terms for Smith/BR style exponents.

    ``log_disc`` is log(delta**l) (0 for the purely spatial case). Returns
    Phi(b/2 - log_disc/b) + exp(log_disc)*Phi(b/2 + log_disc/b), with the
    b -> 0 continuity limit max(1, exp(log_disc)) = 1.
    """
    b = np.asarray(b, dtype=float)
    log_disc = np.broadcast_to(np.asarray(log_disc, dtype=float), b.shape)
    out = np.empty_like(b)
    pos = b > 0
    bp = b[pos]
    cp = log_disc[pos]
    out[pos] = ndtr(bp / 2 - cp / bp) + np.exp(cp) * ndtr(bp / 2 + cp / bp)
    out[~pos] = 1.0
    return out


def _theta_schlather_pair(rho, disc):
    """(1 + delta^l)/2 * (1 + sqrt(1 - 2*delta^l*(rho+1)/(1+delta^l)^2))."""
    rho = np.asarray(rho, dtype=float)
    disc = np.broadcast_to(np.asarray(disc, dtype=float), rho.shape)
    inner = 1.0 - 2.0 * disc * (rho + 1.0) / (1.0 + disc) ** 2
    return 0.5 * (1.0 + disc) * (1.0 + np.sqrt(np.clip(inner, 0.0, None)))


def _theta_extt_pair(rho, nu, disc):
    """T_{nu+1}(z(delta^-l)) + delta^l * T_{nu+1}(z(delta^l)) with rho -> 1 limit."""
    rho = np.asarray(rho, dtype=float)
    disc = np.broadcast_to(np.asarray(disc, dtype=float), rho.shape)
    out = np.empty_like(rho)
    deg = rho >= 1.0 - 1e-15
    out[deg] = 1.0
    r = rho[~deg]
    d = disc[~deg]
    scale = np.sqrt((nu + 1.0) / (1.0 - r ** 2))
    z1 = scale * (np.power(1.0 / d, 1.0 / nu) - r)
    z2 = scale * (np.power(d, 1.0 / nu) - r)
    out[~deg] = stdtr(nu + 1, z1) + d * stdtr(nu + 1, z2)
    return out


def _mar_b(inn: Innovation, u: np.ndarray):
    """Husler-Reiss style b(u) for Smith/BR innovations; u has shape (..., 2)."""
    if isinstance(inn, SmithInnovation):
        q = np.einsum("...i,ij,...j->...", u, inn.sigma_inv, u)
        return np.sqrt(np.clip(q, 0.0, None))
    if isinstance(inn, BRInnovation):
        d = np.linalg.norm(u, axis=-1)
        return np.sqrt(2.0 * np.power(d / inn.phi, inn.kappa))
    raise InvalidArgs("b(u) defined only for Smith/BR innovations")


# ---------------------------------------------------------------------------
# extremal dependence function theta (direct formulas)
# ---------------------------------------------------------------------------

def theta_vec(m: ModelSpec, hvec: np.ndarray, l) -> np.ndarray:
    """Vectorized extremal coefficient; hvec has shape (..., 2)."""
    hvec = np.asarray(hvec, dtype=float)
    l = np.asarray(l, dtype=float)
    if np.any(l < 0):
        raise InvalidArgs("temporal lag must be nonnegative")
    p = m.params
    if m.family == "A1":
        hn = np.linalg.norm(hvec, axis=-1)
        g2 = p.phi_s * np.power(hn, p.kappa_s) + p.phi_t * np.power(l, p.kappa_t)
        return 2.0 * ndtr(np.sqrt(g2))
    if m.family == "A2":
        hn = np.linalg.norm(hvec, axis=-1)
        rho = np.exp(-(np.power(hn / p.phi_s, p.kappa_s)
                       + np.power(l / p.phi_t, p.kappa_t)))
        return 1.0 + np.sqrt((1.0 - rho) / 2.0)
    # MAR families
    tau = np.asarray(p.tau, dtype=float)
    u = hvec - l[..., None] * tau if np.ndim(l) else hvec - l * tau
    disc = np.power(p.delta, l)
    inn = p.innovation
    if isinstance(inn, (SmithInnovation, BRInnovation)):
        b = _mar_b(inn, u)
        core = _theta_husler(b, np.log(disc) * np.ones_like(b))
    elif isinstance(inn, SchlatherInnovation):
        rho = _pow_exp_corr(np.linalg.norm(u, axis=-1), inn.phi, inn.kappa)
        core = _theta_schlather_pair(rho, disc)
    else:
        rho = _pow_exp_corr(np.linalg.norm(u, axis=-1), inn.phi, inn.kappa)
        core = _theta_extt_pair(rho, inn.nu, disc)
    return core + 1.0 - disc


def theta(m: ModelSpec, h, l: float) -> float:
    """Extremal coefficient theta(h, l) in [1, 2]."""
    l = _check_time_lag(l)
    hvec = _resolve_lag(m, h, l)
    return float(theta_vec(m, hvec, np.asarray(l)))


def theta_to_fmadogram(th):
    return 0.5 - 1.0 / (np.asarray(th) + 1.0)


def fmadogram_to_theta(nu):
    nu = np.asarray(nu)
    return 1.0 / (0.5 - nu) - 1.0


def fmadogram_model(m: ModelSpec, h, l: float) -> float:
    """Model F-madogram nu_F = 1/2 - 1/(theta + 1), in [0, 1/6]."""
    return float(theta_to_fmadogram(theta(m, h, l)))


# ---------------------------------------------------------------------------
# bivariate exponent function V (independent code path)
# ---------------------------------------------------------------------------

def _v_husler(b: float, x1, x2):
    """Husler-Reiss / Smith / BR pair exponent with dependence scalar b >= 0."""
    if b <= 0:
        return max(1.0 / x1, 1.0 / x2)
    lr = math.log(x2 / x1)
    return (ndtr(b / 2 + lr / b) / x1
            + ndtr(b / 2 - lr / b) / x2)


def _v_schlather(rho: float, x1, x2):
    inner = 1.0 - 2.0 * (rho + 1.0) * x1 * x2 / (x1 + x2) ** 2
    inner = max(inner, 0.0)
    return 0.5 * (1.0 / x1 + 1.0 / x2) * (1.0 + math.sqrt(inner))


def _v_extremal_t(rho: float, nu: float, x1, x2):
    if rho >= 1.0 - 1e-15:
        return max(1.0 / x1, 1.0 / x2)
    scale = math.sqrt((nu + 1.0) / (1.0 - rho * rho))
    z12 = scale * ((x2 / x1) ** (1.0 / nu) - rho)
    z21 = scale * ((x1 / x2) ** (1.0 / nu) - rho)
    return (stdtr(nu + 1, z12) / x1
            + stdtr(nu + 1, z21) / x2)


def _v_innovation(inn: Innovation, u: np.ndarray, x1: float, x2: float) -> float:
    """Spatial innovation pair exponent at displacement u."""
    if isinstance(inn, (SmithInnovation, BRInnovation)):
        return _v_husler(float(_mar_b(inn, u)), x1, x2)
    rho = float(_pow_exp_corr(np.linalg.norm(u), inn.phi, inn.kappa))
    if isinstance(inn, SchlatherInnovation):
        return _v_schlather(rho, x1, x2)
    return _v_extremal_t(rho, inn.nu, x1, x2)


def exponent_V(m: ModelSpec, h, l: float, x1: float, x2: float) -> float:
    """Bivariate exponent V(x1, x2) = -log F_{h,l}(x1, x2)."""
    if x1 <= 0 or x2 <= 0:
        raise InvalidArgs("x1, x2 must be positive")
    l = _check_time_lag(l)
    hvec = _resolve_lag(m, h, l)
    p = m.params
    if m.family == "A1":
        g = fbm_semivariogram(np.linalg.norm(hvec), l, p)
        return _v_husler(math.sqrt(2.0 * g), x1, x2)
    if m.family == "A2":
        hn = float(np.linalg.norm(hvec))
        expo = ((hn / p.phi_s) ** p.kappa_s if hn > 0 else 0.0) \
            + ((l / p.phi_t) ** p.kappa_t if l > 0 else 0.0)
        return _v_schlather(math.exp(-expo), x1, x2)
    # MAR composition: V(x1, x2) = V_inn(x1, x2/delta^l) + (1 - delta^l)/x2
    u = hvec - l * np.asarray(p.tau, dtype=float)
    disc = p.delta ** l
    return _v_innovation(p.innovation, u, x1, x2 / disc) + (1.0 - disc) / x2


def bivariate_cdf(m: ModelSpec, h, l: float, x1: float, x2: float) -> float:
    """P(X(s,t) <= x1, X(s+h, t+l) <= x2) = exp(-V)."""
    return math.exp(-exponent_V(m, h, l, x1, x2))


def lambda_madogram(m: ModelSpec, h, l: float, lam: float) -> float:
    """Closed-form lambda-madogram of the MAR class."""
    if not 0 < lam < 1:
        raise InvalidArgs("lambda must lie strictly in (0, 1)")
    if not m.is_mar:
        raise InvalidArgs("closed-form lambda-madogram applies to MAR models only")
    l = _check_time_lag(l)
    hvec = _resolve_lag(m, h, l)
    p = m.params
    u = hvec - l * np.asarray(p.tau, dtype=float)
    disc = p.delta ** l
    v = _v_innovation(p.innovation, u, lam, (1.0 - lam) / disc)
    c_lam = 3.0 / (2.0 * (1.0 + lam) * (2.0 - lam))
    num = (1.0 - lam) * v + 1.0 - disc
    den = (1.0 - lam) * (1.0 + v) + 1.0 - disc
    return num / den - c_lam


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------

_INNOVATION_TAGS = {
    "smith": SmithInnovation,
    "br": BRInnovation,
    "schlather": SchlatherInnovation,
    "extremal_t": ExtremalTInnovation,
}


def model_to_dict(m: ModelSpec) -> dict:
    p = m.params
    if isinstance(p, (BRParams, SepSchlatherParams)):
        params = {"phi_s": p.phi_s, "kappa_s": p.kappa_s,
                  "phi_t": p.phi_t, "kappa_t": p.kappa_t}
    else:
        inn = p.innovation
        tag = next(k for k, v in _INNOVATION_TAGS.items() if isinstance(inn, v))
        inn_d = {"kind": tag}
        if isinstance(inn, SmithInnovation):
            inn_d.update(sigma11=inn.sigma11, sigma12=inn.sigma12,
                         sigma22=inn.sigma22)
        elif isinstance(inn, ExtremalTInnovation):
            inn_d.update(phi=inn.phi, kappa=inn.kappa, nu=inn.nu)
        else:
            inn_d.update(phi=inn.phi, kappa=inn.kappa)
        params = {"innovation": inn_d, "tau": list(p.tau), "delta": p.delta}
    return {"family": m.family, "params": params}


def model_from_dict(d: dict) -> ModelSpec:
    family = d["family"]
    params = d["params"]
    if family in ("A1", "A2"):
        cls = BRParams if family == "A1" else SepSchlatherParams
        return ModelSpec(family, cls(**params))
    inn_d = dict(params["innovation"])
    kind = inn_d.pop("kind")
    if kind not in _INNOVATION_TAGS:
        raise InvalidArgs(f"unknown innovation kind {kind!r}")
    inn = _INNOVATION_TAGS[kind](**inn_d)
    return ModelSpec(family, MarParams(innovation=inn,
                                       tau=tuple(params["tau"]),
                                       delta=params["delta"]))
