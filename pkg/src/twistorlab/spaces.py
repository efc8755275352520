"""Coordinate models of the Lorentzian spaces: metrics, frames, curvature.

Every space exposes the same local-geometry surface used by the spinor
operators:

* ``frame_at(p)``      orthonormal frame (vectors in point coordinates)
* ``clifford(X, p)``   matrix of Clifford multiplication by a tangent vector
* ``connection(X, p)`` matrix ``Omega_X`` with ``nabla_X phi = X(phi) + Omega_X phi``
* ``derivative(field, p, X)`` directional derivative of a spinor field

Point coordinates are chart coordinates for :class:`Flat`,
:class:`CahenWallach` and :class:`Covering`, and ambient coordinates on the
level set for :class:`PseudoSphere` / :class:`PseudoHyperbolic`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .clifford import CliffordModel, build_model, vector_matrix

__all__ = [
    "Frame", "SpaceModel", "Flat", "CahenWallach", "m_plus", "m_minus",
    "PseudoSphere", "PseudoHyperbolic", "Covering", "space_from_dict",
    "metric_at", "frame_at", "ricci", "schouten", "weyl_action",
    "is_conformally_flat", "scalar_curvature", "CurvatureData",
    "curvature_oracle", "sectional_curvature", "oracle_weyl_action",
    "gram_schmidt", "bivector_clifford", "curvature_from_metric", "FD_STEP",
]

FD_STEP = 1e-6


@dataclass(frozen=True)
class Frame:
    vectors: np.ndarray  # shape (n, d): row j is s_j
    signs: np.ndarray

    def __len__(self):
        return len(self.signs)

    def orthonormality_defect(self, metric: np.ndarray) -> float:
        gram = self.vectors @ metric @ self.vectors.T
        return float(np.max(np.abs(gram - np.diag(self.signs))))


def gram_schmidt(metric: np.ndarray, candidates, tol: float = 1e-6) -> Frame:
    """Orthonormalize candidate vectors under an indefinite metric.

    Candidates that become (nearly) null after projection are skipped.
    """
    vecs, signs = [], []
    for c in candidates:
        v = np.array(c, dtype=float)
        for s, e in zip(vecs, signs):
            v = v - e * (v @ metric @ s) * s
        norm2 = v @ metric @ v
        if abs(norm2) < tol * max(1.0, v @ v):
            continue
        vecs.append(v / math.sqrt(abs(norm2)))
        signs.append(math.copysign(1.0, norm2))
    return Frame(np.array(vecs), np.array(signs))


class SpaceModel:
    """Base class; subclasses set ``n``, ``model`` and the geometry hooks."""

    kind: str = "abstract"

    @property
    def n(self) -> int:
        raise NotImplementedError

    @property
    def model(self) -> CliffordModel:
        raise NotImplementedError

    @property
    def point_dim(self) -> int:
        return self.n

    def metric_at(self, p) -> np.ndarray:
        raise NotImplementedError

    def frame_at(self, p) -> Frame:
        raise NotImplementedError

    def frame_generators(self, p) -> np.ndarray:
        """Clifford matrices of the frame vectors at ``p``."""
        frame = self.frame_at(p)
        return np.array([self.clifford(s, p) for s in frame.vectors])

    def tangent_metric(self, p) -> np.ndarray:
        """Metric used to pair tangent vectors given in point coordinates."""
        return self.metric_at(p)

    def clifford(self, X, p) -> np.ndarray:
        raise NotImplementedError

    def connection(self, X, p) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, field, p, X) -> np.ndarray:
        return field.directional(p, X)

    def is_tangent(self, X, p, tol: float = 1e-8) -> bool:
        return True

    def sample_points(self, rng, count: int, scale: float = 1.0) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


# --------------------------------------------------------------------------- chart spaces


class _ChartSpace(SpaceModel):
    """Spaces whose spinor bundle is trivialized by a fixed frame field."""

    def frame_components(self, X, p) -> np.ndarray:
        frame = self.frame_at(p)
        return frame.signs * (frame.vectors @ self.metric_at(p) @ np.asarray(X, dtype=float))

    def clifford(self, X, p) -> np.ndarray:
        return vector_matrix(self.model, self.frame_components(X, p))

    def frame_generators(self, p) -> np.ndarray:
        return np.asarray(self.model.generators)

    def christoffel(self, p) -> np.ndarray:
        """Closed-form ``Gamma^a_{bc}``, indexed ``[a, b, c]``."""
        raise NotImplementedError

    def sample_points(self, rng, count, scale=1.0):
        return scale * rng.standard_normal((count, self.n))


@dataclass(frozen=True)
class Flat(_ChartSpace):
    """Semi-Euclidean space R^{n,k} in orthonormal coordinates."""

    dim: int
    k: int = 0
    kind = "flat"

    def __post_init__(self):
        if self.dim < 1 or not 0 <= self.k <= self.dim:
            raise ValueError(f"invalid flat signature ({self.dim}, {self.k})")

    @property
    def n(self):
        return self.dim

    @property
    def model(self):
        return build_model((self.dim, self.k))

    def metric_at(self, p=None):
        return np.diag(self.model.eps)

    def frame_at(self, p=None):
        return Frame(np.eye(self.dim), self.model.eps.copy())

    def frame_components(self, X, p=None):
        return np.asarray(X, dtype=float)

    def connection(self, X, p=None):
        return np.zeros((self.model.dim, self.model.dim), dtype=complex)

    def christoffel(self, p=None):
        return np.zeros((self.dim,) * 3)

    def to_dict(self):
        return {"kind": "flat", "n": self.dim, "k": self.k}


@dataclass(frozen=True)
class CahenWallach(_ChartSpace):
    """``(R^n, 2 ds dt + sum lam_j x_j^2 ds^2 + sum dx_j^2)``; coordinates ``(s, t, x)``.

    Frame order is ``(a_0bar, a_0, a_1, ..., a_{n-2})`` and maps to the
    generators ``e_1, ..., e_n`` of ``Cliff(n, 1)``.
    """

    lam: tuple
    label: Optional[str] = None
    kind = "cahen-wallach"

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lam)
        object.__setattr__(self, "lam", lam)
        if len(lam) < 1:
            raise ValueError("need at least one lambda (n >= 3)")
        if any(v == 0.0 for v in lam):
            raise ValueError(f"all lambda_j must be non-zero, got {lam}")

    @property
    def n(self):
        return len(self.lam) + 2

    @property
    def model(self):
        return build_model((self.n, 1))

    @property
    def lam_array(self):
        return np.array(self.lam)

    @property
    def Lambda0(self) -> float:
        return -float(sum(self.lam))

    @property
    def V(self) -> np.ndarray:
        v = np.zeros(self.n)
        v[1] = 1.0
        return v

    def _H(self, p):
        x = np.asarray(p, dtype=float)[2:]
        return float(np.sum(self.lam_array * x * x))

    def metric_at(self, p):
        g = np.eye(self.n)
        g[0, 0] = self._H(p)
        g[1, 1] = 0.0
        g[0, 1] = g[1, 0] = 1.0
        return g

    def frame_at(self, p):
        H = self._H(p)
        vecs = np.zeros((self.n, self.n))
        vecs[0, 0], vecs[0, 1] = 1.0, -0.5 * (H + 1.0)
        vecs[1, 0], vecs[1, 1] = 1.0, -0.5 * (H - 1.0)
        vecs[2:, 2:] = np.eye(self.n - 2)
        return Frame(vecs, self.model.eps.copy())

    def frame_components(self, X, p):
        # closed-form inverse of the frame: X = c0 a0bar + c1 a0 + sum c_j a_j
        X = np.asarray(X, dtype=float)
        H = self._H(p)
        xs, xt = X[0], X[1]
        # xs = c0 + c1, xt = -(H+1)/2 c0 - (H-1)/2 c1
        c0 = -(xt + 0.5 * (H - 1.0) * xs)
        c1 = xs - c0
        return np.concatenate([[c0, c1], X[2:]])

    def christoffel(self, p):
        x = np.asarray(p, dtype=float)[2:]
        G = np.zeros((self.n,) * 3)
        lx = self.lam_array * x
        G[1, 0, 2:] = lx
        G[1, 2:, 0] = lx
        G[2:, 0, 0] = -lx
        return G

    def connection(self, X, p):
        """Closed form: ``1/2 ds(X) sum_j lam_j x_j a_j . V``."""
        X = np.asarray(X, dtype=float)
        gens = self.model.generators
        x = np.asarray(p, dtype=float)[2:]
        Vmat = gens[1] - gens[0]
        A = sum(l * xj * g for l, xj, g in zip(self.lam, x, gens[2:]))
        return 0.5 * X[0] * (A @ Vmat)

    def to_dict(self):
        d = {"kind": "cahen-wallach", "lambda": list(self.lam)}
        if self.label in ("m-plus", "m-minus"):
            d = {"kind": self.label, "n": self.n}
        return d

    @property
    def sign(self) -> Optional[int]:
        """+1 / -1 for the conformally flat models with lambda = (+-1, ..., +-1)."""
        if all(v == 1.0 for v in self.lam):
            return 1
        if all(v == -1.0 for v in self.lam):
            return -1
        return None


def m_plus(n: int) -> CahenWallach:
    if n < 3:
        raise ValueError("n >= 3 required")
    return CahenWallach((1.0,) * (n - 2), label="m-plus")


def m_minus(n: int) -> CahenWallach:
    if n < 3:
        raise ValueError("n >= 3 required")
    return CahenWallach((-1.0,) * (n - 2), label="m-minus")


# --------------------------------------------------------------------------- hypersurfaces


class _Hypersurface(SpaceModel):
    """Level set ``<x, x> = kappa r^2`` in a flat ambient space, ambient coordinates.

    Spinors are ambient spinors; the spinor derivative carries the Gauss term
    ``1/2 kappa (nabla_X eta) . eta`` with ``nabla_X eta = X / r``.
    """

    ambient_k = 1
    kappa = 1

    @property
    def n(self):
        return self.dim

    @property
    def point_dim(self):
        return self.dim + 1

    @property
    def model(self):
        return build_model((self.dim + 1, self.ambient_k))

    @property
    def ambient_metric(self):
        return np.diag(self.model.eps)

    @property
    def half_spinor_bundle(self) -> Optional[np.ndarray]:
        """Projector onto the spinor bundle of the hypersurface (n odd: Delta^+)."""
        if self.dim % 2 == 1:
            return self.model.plus_projector
        return None

    def level(self, p) -> float:
        p = np.asarray(p, dtype=float)
        return float(p @ self.ambient_metric @ p)

    def normal(self, p) -> np.ndarray:
        return np.asarray(p, dtype=float) / self.r

    def tangent_metric(self, p):
        return self.ambient_metric

    def project(self, p) -> np.ndarray:
        """Rescale an ambient point back onto the level set."""
        p = np.asarray(p, dtype=float)
        val = self.level(p)
        if val * self.kappa <= 0:
            raise ValueError("point cannot be rescaled onto the level set")
        return p * (self.r / math.sqrt(abs(val)))

    def is_tangent(self, X, p, tol=1e-8):
        return abs(np.asarray(X) @ self.ambient_metric @ np.asarray(p)) <= tol * max(1.0, self.r)

    def frame_at(self, p):
        p = np.asarray(p, dtype=float)
        G = self.ambient_metric
        eta = self.normal(p)
        cand = [np.eye(self.dim + 1)[i] for i in range(self.dim + 1)]
        rng = np.random.default_rng(0)
        cand += list(rng.standard_normal((self.dim + 1, self.dim + 1)))
        tangent = [c - self.kappa * (c @ G @ eta) * eta for c in cand]
        frame = gram_schmidt(G, tangent)
        if len(frame) < self.dim:
            raise RuntimeError("failed to build a tangent frame")
        return Frame(frame.vectors[: self.dim], frame.signs[: self.dim])

    def clifford(self, X, p=None):
        return vector_matrix(self.model, np.asarray(X, dtype=float))

    def connection(self, X, p):
        return (0.5 * self.kappa / self.r) * self.clifford(X) @ self.clifford(self.normal(p))

    def derivative(self, field, p, X, h: float = FD_STEP):
        """Tangential derivative along the level-set curve ``project(p + s X)``."""
        X = np.asarray(X, dtype=float)
        if not self.is_tangent(X, p, tol=1e-6):
            raise ValueError("direction is not tangent to the hypersurface")
        p = np.asarray(p, dtype=float)
        fwd = field(self.project(p + h * X))
        bwd = field(self.project(p - h * X))
        return (fwd - bwd) / (2.0 * h)

    # graph chart x_{n+1} = sqrt(...) used by the curvature oracle
    def graph_height(self, q) -> float:
        q = np.asarray(q, dtype=float)
        eps = self.model.eps[: self.dim]
        val = self.kappa * self.r ** 2 - float(np.sum(eps * q * q))
        if val <= 0:
            raise ValueError("point outside the graph chart")
        return math.sqrt(val)

    def chart_metric(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        eps = self.model.eps[: self.dim]
        h = self.graph_height(q)
        dh = -eps * q / h
        return np.diag(eps) + np.outer(dh, dh)

    def metric_at(self, p):
        """Induced metric in the graph chart (first ``n`` ambient coordinates)."""
        p = np.asarray(p, dtype=float)
        return self.chart_metric(p[: self.dim])


@dataclass(frozen=True)
class PseudoSphere(_Hypersurface):
    """``S^n_1(r) = {<x,x>_{n+1,1} = r^2}``."""

    dim: int
    r: float = 1.0
    kind = "pseudo-sphere"
    ambient_k = 1
    kappa = 1

    def __post_init__(self):
        if self.dim < 2 or self.r <= 0:
            raise ValueError("need n >= 2 and r > 0")

    def sample_points(self, rng, count, scale=1.0):
        pts = []
        for _ in range(count):
            x1 = scale * rng.standard_normal()
            d = rng.standard_normal(self.dim)
            d /= np.linalg.norm(d)
            pts.append(np.concatenate([[x1], math.sqrt(self.r ** 2 + x1 ** 2) * d]))
        return np.array(pts)

    def to_dict(self):
        return {"kind": "pseudo-sphere", "n": self.dim, "r": self.r}


def _universal_cover_point(r, t, x):
    rho = math.sqrt(r * r + float(np.dot(x, x)))
    return np.concatenate([[rho * math.cos(t), rho * math.sin(t)], x])


@dataclass(frozen=True)
class PseudoHyperbolic(_Hypersurface):
    """``H^n_1(r) = {<x,x>_{n+1,2} = -r^2}``."""

    dim: int
    r: float = 1.0
    kind = "pseudo-hyperbolic"
    ambient_k = 2
    kappa = -1

    def __post_init__(self):
        if self.dim < 2 or self.r <= 0:
            raise ValueError("need n >= 2 and r > 0")

    def sample_points(self, rng, count, scale=1.0):
        out = []
        for _ in range(count):
            t = rng.uniform(0, 2 * math.pi)
            x = scale * rng.standard_normal(self.dim - 1)
            out.append(_universal_cover_point(self.r, t, x))
        return np.array(out)

    def to_dict(self):
        return {"kind": "pseudo-hyperbolic", "n": self.dim, "r": self.r}


@dataclass(frozen=True)
class Covering(SpaceModel):
    """Lorentzian coverings of ``H^n_1(r)`` in the chart ``(t, x)``.

    ``m = None`` is the universal covering; an integer ``m`` is the covering
    ``N^n_m``, i.e. the quotient of the universal covering by ``t -> t + 2 pi m``.
    Geometry is pulled back through the covering map into ``R^{n+1,2}``.
    """

    dim: int
    r: float = 1.0
    m: Optional[int] = None
    kind = "covering"

    def __post_init__(self):
        if self.dim < 2 or self.r <= 0:
            raise ValueError("need n >= 2 and r > 0")
        if self.m is not None and (int(self.m) != self.m or self.m < 1):
            raise ValueError(f"m must be a positive integer or None, got {self.m!r}")

    @property
    def n(self):
        return self.dim

    @property
    def base(self) -> PseudoHyperbolic:
        return PseudoHyperbolic(self.dim, self.r)

    @property
    def model(self):
        return self.base.model

    @property
    def half_spinor_bundle(self):
        return self.base.half_spinor_bundle

    def embed(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return _universal_cover_point(self.r, p[0], p[1:])

    def jacobian(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        t, x = p[0], p[1:]
        rho = math.sqrt(self.r ** 2 + float(x @ x))
        J = np.zeros((self.dim + 1, self.dim))
        J[0, 0], J[1, 0] = -rho * math.sin(t), rho * math.cos(t)
        J[0, 1:] = math.cos(t) * x / rho
        J[1, 1:] = math.sin(t) * x / rho
        J[2:, 1:] = np.eye(self.dim - 1)
        return J

    def metric_at(self, p):
        J = self.jacobian(p)
        return J.T @ self.base.ambient_metric @ J

    def frame_at(self, p):
        g = self.metric_at(p)
        frame = gram_schmidt(g, np.eye(self.dim))
        if len(frame) < self.dim:
            raise RuntimeError("degenerate pulled-back metric")
        return frame

    def clifford(self, X, p):
        return self.base.clifford(self.jacobian(p) @ np.asarray(X, dtype=float))

    def connection(self, X, p):
        return self.base.connection(self.jacobian(p) @ np.asarray(X, dtype=float), self.embed(p))

    def sample_points(self, rng, count, scale=1.0):
        t = rng.uniform(-2 * math.pi, 2 * math.pi, size=(count, 1))
        x = scale * rng.standard_normal((count, self.dim - 1))
        return np.hstack([t, x])

    def to_dict(self):
        return {"kind": "covering", "n": self.dim, "r": self.r, "m": self.m}


def space_from_dict(doc: dict) -> SpaceModel:
    """Parse ``{"kind": ..., "n": ..., "k": ..., "lambda": [...], "r": ..., "m": ...}``."""
    kind = doc.get("kind")
    try:
        if kind == "flat":
            return Flat(int(doc["n"]), int(doc.get("k", 0)))
        if kind == "cahen-wallach":
            return CahenWallach(tuple(doc["lambda"]))
        if kind == "m-plus":
            return m_plus(int(doc["n"]))
        if kind == "m-minus":
            return m_minus(int(doc["n"]))
        if kind == "pseudo-sphere":
            return PseudoSphere(int(doc["n"]), float(doc.get("r", 1.0)))
        if kind == "pseudo-hyperbolic":
            return PseudoHyperbolic(int(doc["n"]), float(doc.get("r", 1.0)))
        if kind == "covering":
            m = doc.get("m")
            return Covering(int(doc["n"]), float(doc.get("r", 1.0)), None if m is None else int(m))
    except KeyError as exc:
        raise ValueError(f"space description for {kind!r} is missing {exc}") from None
    raise ValueError(f"unknown space kind {kind!r}")


# --------------------------------------------------------------------------- closed-form curvature


def metric_at(space: SpaceModel, p) -> np.ndarray:
    return space.metric_at(p)


def frame_at(space: SpaceModel, p) -> Frame:
    if not isinstance(space, (CahenWallach, Flat)):
        raise TypeError(f"global frame formulas are only defined for Cahen-Wallach spaces, not {space.kind}")
    return space.frame_at(p)


def _require_cw(space):
    if not isinstance(space, CahenWallach):
        raise TypeError(f"closed-form curvature is only available for Cahen-Wallach spaces, not {space.kind}")


def ricci(space: SpaceModel, X, p) -> np.ndarray:
    """Ricci endomorphism ``Lambda_0 g(X, V) V``."""
    if isinstance(space, Flat):
        return np.zeros(space.n)
    _require_cw(space)
    g = space.metric_at(p)
    return space.Lambda0 * (np.asarray(X, dtype=float) @ g @ space.V) * space.V


def scalar_curvature(space: SpaceModel, p=None) -> float:
    if isinstance(space, Flat):
        return 0.0
    _require_cw(space)
    return 0.0


def schouten(space: SpaceModel, X, p) -> np.ndarray:
    """Schouten endomorphism ``K(X) = -Lambda_0/(n-2) g(X, V) V``."""
    if isinstance(space, Flat):
        return np.zeros(space.n)
    _require_cw(space)
    g = space.metric_at(p)
    return -space.Lambda0 / (space.n - 2) * (np.asarray(X, dtype=float) @ g @ space.V) * space.V


def is_conformally_flat(space: SpaceModel) -> bool:
    if isinstance(space, Flat):
        return True
    _require_cw(space)
    return len(set(space.lam)) == 1


def _wedge(a, b):
    return np.outer(a, b) - np.outer(b, a)


def weyl_action(space: SpaceModel, a: int, b: int, p) -> np.ndarray:
    """Weyl operator on the frame bivector ``s_a ^ s_b`` (0-based frame indices).

    Returns the image bivector as an antisymmetric matrix ``B^{cd}`` in point
    coordinates, ``B = sum_{c<d} B^{cd} d_c ^ d_d``.  Frame index 0 is
    ``a_0bar``, 1 is ``a_0`` and ``j + 1`` is ``a_j``.
    """
    if isinstance(space, Flat):
        return np.zeros((space.n, space.n))
    _require_cw(space)
    n = space.n
    if not (0 <= a < n and 0 <= b < n):
        raise IndexError("frame index out of range")
    if a == b:
        return np.zeros((n, n))
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    if a in (0, 1) and b >= 2:
        j = b - 1
        coeff = space.lam[j - 1] + space.Lambda0 / (n - 2)
        frame = space.frame_at(p)
        return sign * coeff * _wedge(space.V, frame.vectors[b])
    return np.zeros((n, n))


def bivector_clifford(space: SpaceModel, B, p) -> np.ndarray:
    """Action of an antisymmetric ``B^{cd}`` via ``a ^ b -> a . b`` on orthogonal pairs."""
    B = np.asarray(B, dtype=float)
    d = B.shape[0]
    cl = [space.clifford(np.eye(d)[c], p) for c in range(d)]
    out = np.zeros_like(cl[0])
    for c in range(d):
        for e in range(c + 1, d):
            if B[c, e] != 0.0:
                out = out + 0.5 * B[c, e] * (cl[c] @ cl[e] - cl[e] @ cl[c])
    return out


# --------------------------------------------------------------------------- finite-difference oracle


@dataclass(frozen=True)
class CurvatureData:
    metric: np.ndarray
    christoffel: np.ndarray   # Gamma^a_{bc}
    riemann: np.ndarray       # R^a_{bcd}
    ricci: np.ndarray         # R_{bd}
    scalar: float
    weyl: np.ndarray          # W_{abcd}, all indices down

    @property
    def riemann_lower(self):
        return np.einsum("ae,ebcd->abcd", self.metric, self.riemann)

    def ricci_endomorphism(self, X):
        return np.linalg.solve(self.metric, self.ricci @ np.asarray(X, dtype=float))

    def schouten_endomorphism(self, X):
        n = self.metric.shape[0]
        X = np.asarray(X, dtype=float)
        return (self.scalar / (2 * (n - 1)) * X - self.ricci_endomorphism(X)) / (n - 2)


def _fd_christoffel(metric_fn: Callable, q, h: float) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    d = len(q)
    g = metric_fn(q)
    ginv = np.linalg.inv(g)
    dg = np.zeros((d, d, d))  # dg[c, a, b] = d_c g_ab
    for c in range(d):
        e = np.zeros(d)
        e[c] = h
        dg[c] = (metric_fn(q + e) - metric_fn(q - e)) / (2 * h)
    # Gamma^a_{bc} = 1/2 g^{ad} (d_b g_dc + d_c g_db - d_d g_bc)
    lower = 0.5 * (np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg)
    return np.einsum("ad,dbc->abc", ginv, lower)


def curvature_from_metric(metric_fn: Callable, q, h: float = 1e-5, h_outer: float = 1e-4) -> CurvatureData:
    """Brute-force curvature by central differences of ``metric_fn``.

    Christoffel symbols use step ``h``; their derivatives use ``h_outer``.
    """
    q = np.asarray(q, dtype=float)
    d = len(q)
    g = metric_fn(q)
    Gam = _fd_christoffel(metric_fn, q, h)
    dGam = np.zeros((d, d, d, d))  # dGam[e, a, b, c] = d_e Gamma^a_bc
    for e in range(d):
        step = np.zeros(d)
        step[e] = h_outer
        dGam[e] = (_fd_christoffel(metric_fn, q + step, h) - _fd_christoffel(metric_fn, q - step, h)) / (2 * h_outer)
    # R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
    R = (np.einsum("cadb->abcd", dGam) - np.einsum("dacb->abcd", dGam)
         + np.einsum("ace,edb->abcd", Gam, Gam) - np.einsum("ade,ecb->abcd", Gam, Gam))
    Ric = np.einsum("abad->bd", R)
    ginv = np.linalg.inv(g)
    scal = float(np.einsum("bd,bd->", ginv, Ric))
    Rl = np.einsum("ae,ebcd->abcd", g, R)
    if d > 2:
        P = (Ric - scal / (2 * (d - 1)) * g) / (d - 2)
        kn = (np.einsum("ac,bd->abcd", P, g) - np.einsum("ad,bc->abcd", P, g)
              + np.einsum("bd,ac->abcd", P, g) - np.einsum("bc,ad->abcd", P, g))
        W = Rl - kn
    else:
        W = np.zeros_like(Rl)
    return CurvatureData(g, Gam, R, Ric, scal, W)


def curvature_oracle(space: SpaceModel, p, h: float = 1e-5, h_outer: float = 1e-4) -> CurvatureData:
    """Finite-difference curvature at ``p`` in the space's chart.

    Hypersurfaces are evaluated in the graph chart over the first ``n``
    ambient coordinates, so ``p`` there may be ambient or chart coordinates.
    """
    if isinstance(space, _Hypersurface):
        q = np.asarray(p, dtype=float)[: space.dim]
        return curvature_from_metric(space.chart_metric, q, h, h_outer)
    return curvature_from_metric(space.metric_at, p, h, h_outer)


def sectional_curvature(data: CurvatureData, X, Y) -> float:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    g = data.metric
    num = np.einsum("abcd,a,b,c,d->", data.riemann_lower, X, Y, X, Y)
    den = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
    if abs(den) < 1e-8:
        raise ValueError("degenerate plane")
    # R_{abcd} X^a Y^b X^c Y^d = g(R(X, Y) Y, X)
    return float(num / den)


def oracle_weyl_action(data: CurvatureData, X, Y) -> np.ndarray:
    """Weyl operator from oracle data, normalized by ``<W(X^Y), Z^U> = g(W(X,Y)Z, U)``.

    With ``W_{abcd} = g(W(d_c, d_d) d_b, d_a)`` this is ``B^{cd} = -W^{cd}{}_{ab} X^a Y^b``.
    """
    ginv = np.linalg.inv(data.metric)
    up = np.einsum("ce,df,efab->cdab", ginv, ginv, data.weyl)
    return -np.einsum("cdab,a,b->cd", up, np.asarray(X, dtype=float), np.asarray(Y, dtype=float))
