"""Spinor fields and the spinor derivative, Dirac and twistor operators.

All operators act by left multiplication, so a "field" may return either a
single spinor (shape ``(N,)``) or a stack of spinors as columns (shape
``(N, P)``).  The latter evaluates a whole linear family at once.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .spaces import (
    CahenWallach, Flat, Frame, SpaceModel, FD_STEP, bivector_clifford,
    schouten, weyl_action,
)

__all__ = [
    "SpinorField", "TwistorResidual", "IntegrabilityReport", "NotTwistorError",
    "spinor_derivative", "koszul_connection", "dirac", "twistor_residual",
    "penrose_pair_check", "integrability_check", "residual_sweep",
]


class NotTwistorError(ValueError):
    """Raised when an integrability check is requested for a non-twistor field."""


class SpinorField:
    """Spinor-valued function on point coordinates.

    ``partial(p, a)`` returns the first partial derivative along coordinate
    ``a``; without an analytic ``partial`` a central difference is used.
    """

    def __init__(self, value: Callable, partial: Optional[Callable] = None, name: str = ""):
        self._value = value
        self._partial = partial
        self.name = name

    def __call__(self, p):
        return self._value(np.asarray(p, dtype=float))

    @property
    def has_analytic_partials(self) -> bool:
        return self._partial is not None

    def partial(self, p, a: int, h: float = FD_STEP):
        p = np.asarray(p, dtype=float)
        if self._partial is not None:
            return self._partial(p, a)
        e = np.zeros_like(p)
        e[a] = h
        return (self._value(p + e) - self._value(p - e)) / (2 * h)

    def directional(self, p, X):
        X = np.asarray(X, dtype=float)
        out = 0.0
        for a, xa in enumerate(X):
            if xa != 0.0:
                out = out + xa * self.partial(p, a)
        if np.isscalar(out):
            return np.zeros_like(self(p))
        return out

    def finite_difference_defect(self, p, h: float = FD_STEP) -> float:
        """max over coordinates of ``|analytic partial - central difference|``."""
        p = np.asarray(p, dtype=float)
        worst = 0.0
        for a in range(len(p)):
            e = np.zeros_like(p)
            e[a] = h
            fd = (self._value(p + e) - self._value(p - e)) / (2 * h)
            worst = max(worst, float(np.max(np.abs(self.partial(p, a) - fd))))
        return worst

    def __add__(self, other: "SpinorField") -> "SpinorField":
        pa = None
        if self.has_analytic_partials and other.has_analytic_partials:
            pa = lambda p, a: self.partial(p, a) + other.partial(p, a)
        return SpinorField(lambda p: self(p) + other(p), pa)

    def __rmul__(self, c) -> "SpinorField":
        pa = (lambda p, a: c * self.partial(p, a)) if self.has_analytic_partials else None
        return SpinorField(lambda p: c * self(p), pa)

    def __matmul__(self, params) -> "SpinorField":
        """Contract a matrix-valued field with a parameter vector."""
        params = np.asarray(params)
        pa = (lambda p, a: self.partial(p, a) @ params) if self.has_analytic_partials else None
        return SpinorField(lambda p: self(p) @ params, pa)

    @classmethod
    def zero(cls, dim: int) -> "SpinorField":
        return cls(lambda p: np.zeros(dim, dtype=complex), lambda p, a: np.zeros(dim, dtype=complex), "zero")


def spinor_derivative(space: SpaceModel, field: SpinorField, X, p, connection: Optional[Callable] = None):
    """``nabla_X phi = X(phi) + Omega_X phi``.

    ``connection`` overrides the space's closed-form ``Omega_X`` (e.g. with
    :func:`koszul_connection`).
    """
    X = np.asarray(X, dtype=float)
    omega = space.connection(X, p) if connection is None else connection(X, p)
    return space.derivative(field, p, X) + omega @ field(p)


def koszul_connection(space: SpaceModel, christoffel: Optional[Callable] = None, h: float = FD_STEP) -> Callable:
    """Generic spin connection built from Christoffel symbols and the frame.

    ``Omega_X = 1/2 sum_{k<l} eps_k eps_l g(nabla_X s_k, s_l) e_k e_l``;
    frame derivatives are central differences of ``space.frame_at``.
    """
    gamma_fn = christoffel if christoffel is not None else space.christoffel
    gens = np.asarray(space.model.generators)

    def omega(X, p):
        p = np.asarray(p, dtype=float)
        X = np.asarray(X, dtype=float)
        frame = space.frame_at(p)
        g = space.metric_at(p)
        Gam = gamma_fn(p)
        dframe = (space.frame_at(p + h * X).vectors - space.frame_at(p - h * X).vectors) / (2 * h)
        cov = dframe + np.einsum("abc,b,kc->ka", Gam, X, frame.vectors)
        eps = frame.signs
        out = np.zeros(gens[0].shape, dtype=complex)
        n = len(eps)
        for k in range(n):
            for l in range(k + 1, n):
                c = eps[k] * eps[l] * (cov[k] @ g @ frame.vectors[l])
                if c != 0.0:
                    out += 0.5 * c * gens[k] @ gens[l]
        return out

    return omega


def _frame(space, p, frame):
    return space.frame_at(p) if frame is None else frame


def dirac(space: SpaceModel, field: SpinorField, p, frame: Optional[Frame] = None, connection=None):
    """``D phi = sum_j eps_j s_j . nabla_{s_j} phi``."""
    fr = _frame(space, p, frame)
    out = 0.0
    for s, e in zip(fr.vectors, fr.signs):
        out = out + e * space.clifford(s, p) @ spinor_derivative(space, field, s, p, connection)
    return out


@dataclass
class TwistorResidual:
    point: np.ndarray
    directions: np.ndarray
    residuals: np.ndarray          # residuals[j] = nabla_{s_j} phi + 1/n s_j . D phi
    bundle_defect: float = 0.0     # size of the component outside the spinor bundle

    @property
    def norms(self) -> np.ndarray:
        r = self.residuals.reshape(len(self.residuals), -1)
        return np.max(np.abs(r), axis=1) if r.size else np.zeros(len(self.residuals))

    @property
    def max_norm(self) -> float:
        return float(max(np.max(self.norms, initial=0.0), self.bundle_defect))

    def to_rows(self) -> list:
        pt = [float(v) for v in self.point]
        return [
            {"point": pt, "direction": [float(v) for v in d], "residual_norm": float(r)}
            for d, r in zip(self.directions, self.norms)
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_rows())


def twistor_residual(space: SpaceModel, field: SpinorField, p, frame: Optional[Frame] = None,
                     connection=None) -> TwistorResidual:
    p = np.asarray(p, dtype=float)
    fr = _frame(space, p, frame)
    n = space.n
    nablas = [spinor_derivative(space, field, s, p, connection) for s in fr.vectors]
    D = 0.0
    for s, e, nb in zip(fr.vectors, fr.signs, nablas):
        D = D + e * space.clifford(s, p) @ nb
    res = np.array([nb + space.clifford(s, p) @ D / n for s, nb in zip(fr.vectors, nablas)])
    defect = 0.0
    proj = getattr(space, "half_spinor_bundle", None)
    if proj is not None:
        off = field(p) - proj @ field(p)
        defect = float(np.max(np.abs(off), initial=0.0))
    return TwistorResidual(p, fr.vectors.copy(), res, defect)


def penrose_pair_check(space: SpaceModel, field: SpinorField, p, tol: float = 1e-6,
                       frame: Optional[Frame] = None) -> bool:
    """True iff ``g(X,X) X . nabla_X phi`` is the same spinor for every unit frame vector."""
    fr = _frame(space, p, frame)
    vals = [e * space.clifford(s, p) @ spinor_derivative(space, field, s, p) for s, e in zip(fr.vectors, fr.signs)]
    ref = vals[0]
    return all(float(np.max(np.abs(v - ref), initial=0.0)) <= tol for v in vals[1:])


@dataclass
class IntegrabilityReport:
    point: np.ndarray
    schouten_defect: float          # max_X |nabla_X D phi - n/2 K(X) . phi|
    weyl_defect: float              # max_eta |W(eta) . phi|
    tol: float
    weyl_terms: dict = dc_field(default_factory=dict)

    @property
    def schouten_ok(self) -> bool:
        return self.schouten_defect <= self.tol

    @property
    def weyl_ok(self) -> bool:
        return self.weyl_defect <= self.tol

    @property
    def ok(self) -> bool:
        return self.schouten_ok and self.weyl_ok

    def to_dict(self) -> dict:
        return {
            "point": [float(v) for v in self.point],
            "schouten_defect": self.schouten_defect,
            "weyl_defect": self.weyl_defect,
            "tol": self.tol,
            "pass": self.ok,
        }


def integrability_check(space: SpaceModel, field: SpinorField, p, tol: float = 1e-5,
                        twistor_tol: float = 1e-6, h: float = 1e-5) -> IntegrabilityReport:
    """Check ``nabla_X D phi = n/2 K(X) . phi`` and ``W(eta) . phi = 0`` on frame data.

    Only spaces with closed-form curvature (flat and Cahen-Wallach) are supported.
    """
    if not isinstance(space, (CahenWallach, Flat)):
        raise TypeError(f"integrability data unavailable for {space.kind}")
    p = np.asarray(p, dtype=float)
    res = twistor_residual(space, field, p)
    if res.max_norm > twistor_tol:
        raise NotTwistorError(f"field is not a twistor spinor at {p.tolist()} (residual {res.max_norm:.3e})")
    Dfield = SpinorField(lambda q: dirac(space, field, q))
    fr = space.frame_at(p)
    phi = field(p)
    n = space.n
    sch = 0.0
    for s in fr.vectors:
        lhs = space.connection(s, p) @ Dfield(p)
        lhs = lhs + sum(s[a] * Dfield.partial(p, a, h) for a in range(len(s)) if s[a] != 0.0)
        rhs = 0.5 * n * space.clifford(schouten(space, s, p), p) @ phi
        sch = max(sch, float(np.max(np.abs(lhs - rhs), initial=0.0)))
    wey = 0.0
    terms = {}
    for a in range(n):
        for b in range(a + 1, n):
            B = weyl_action(space, a, b, p)
            if not np.any(B):
                continue
            val = bivector_clifford(space, B, p) @ phi
            terms[(a, b)] = val
            wey = max(wey, float(np.max(np.abs(val), initial=0.0)))
    return IntegrabilityReport(p, sch, wey, tol, terms)


def residual_sweep(space: SpaceModel, field: SpinorField, points) -> list:
    """Twistor residuals at every sample point (deterministic order)."""
    return [twistor_residual(space, field, p) for p in np.atleast_2d(points)]
