"""Explicit twistor-spinor families as linear parameter spaces.

A :class:`SolutionFamily` stores a matrix-valued basis field ``M(p)`` of
shape ``(N, P)``; the field for parameters ``c in C^P`` is ``M(p) @ c``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .clifford import build_model, half_spinor_basis, u_vector, vector_matrix
from .spaces import (
    CahenWallach, Covering, Flat, PseudoHyperbolic, PseudoSphere, SpaceModel,
    is_conformally_flat, m_minus, m_plus,
)
from .spinops import SpinorField

__all__ = [
    "SolutionFamily", "flat_family", "cahen_wallach_parallel_family", "mpm_family",
    "hypersurface_family", "covering_family", "affine_ansatz", "twistor_family",
    "delta_V_basis", "in_delta_V", "complex_to_pairs", "pairs_to_complex",
]


def complex_to_pairs(z) -> list:
    return [[float(v.real), float(v.imag)] for v in np.asarray(z, dtype=complex).ravel()]


def pairs_to_complex(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    return arr[:, 0] + 1j * arr[:, 1]


@dataclass(frozen=True, eq=False)
class SolutionFamily:
    name: str
    space: SpaceModel
    parameter_space: str
    basis: Callable                       # p -> (N, P)
    basis_partial: Optional[Callable]     # (p, a) -> (N, P)
    dimension: int

    def evaluate(self, p) -> np.ndarray:
        return self.basis(np.asarray(p, dtype=float))

    def as_field(self) -> SpinorField:
        """Matrix-valued field whose columns are the basis fields."""
        return SpinorField(self.basis, self.basis_partial, name=self.name)

    def instantiate(self, params) -> SpinorField:
        params = np.asarray(params, dtype=complex)
        if params.shape != (self.dimension,):
            raise ValueError(f"{self.name} expects {self.dimension} parameters, got shape {params.shape}")
        return self.as_field() @ params

    def transformed(self, spinor_map=None, param_map=None) -> "SolutionFamily":
        """Family with basis ``Q M(p) R`` (change of spinor and parameter bases)."""
        Q = np.eye(self.space.model.dim) if spinor_map is None else np.asarray(spinor_map)
        R = np.eye(self.dimension) if param_map is None else np.asarray(param_map)
        bp = None
        if self.basis_partial is not None:
            bp = lambda p, a: Q @ self.basis_partial(p, a) @ R
        return SolutionFamily(self.name, self.space, self.parameter_space,
                              lambda p: Q @ self.basis(p) @ R, bp, R.shape[1])

    def to_dict(self, params=None) -> dict:
        doc = {"family": self.name, "space": self.space.to_dict(), "dimension": self.dimension}
        if params is not None:
            doc["params"] = complex_to_pairs(params)
        return doc

    def to_json(self, params=None) -> str:
        return json.dumps(self.to_dict(params))


# --------------------------------------------------------------------------- flat space


def _position_matrix(model, x):
    return vector_matrix(model, np.asarray(x, dtype=float))


def flat_family(n: int, k: int = 0) -> SolutionFamily:
    """``phi(x) = u + x . v`` on ``R^{n,k}``; parameters ``(u, v)``."""
    if n < 3:
        raise ValueError("n >= 3 required")
    space = Flat(n, k)
    model = space.model
    N = model.dim
    eye = np.eye(N, dtype=complex)
    gens = model.generators

    def basis(p):
        return np.hstack([eye, _position_matrix(model, p)])

    def partial(p, a):
        return np.hstack([np.zeros((N, N), dtype=complex), gens[a]])

    return SolutionFamily("flat", space, "(u, v) in Delta_{n,k} + Delta_{n,k}", basis, partial, 2 * N)


def affine_ansatz(space: SpaceModel) -> SolutionFamily:
    """``phi(y) = w_0 + sum_a y^a w_a`` with every ``w`` free in the full spinor module."""
    N = space.model.dim
    d = space.point_dim
    eye = np.eye(N, dtype=complex)

    def basis(p):
        return np.hstack([eye] + [p[a] * eye for a in range(d)])

    def partial(p, a):
        blocks = [np.zeros((N, N), dtype=complex)] * (d + 1)
        blocks = list(blocks)
        blocks[a + 1] = eye
        return np.hstack(blocks)

    return SolutionFamily("affine-ansatz", space, "(w_0, ..., w_d) in Delta^(d+1)", basis, partial, (d + 1) * N)


# --------------------------------------------------------------------------- Cahen-Wallach


def delta_V_basis(n: int) -> np.ndarray:
    """Columns spanning ``Delta_{n-2,0} (x) u(-1)`` inside ``Delta_{n,1}``."""
    inner = build_model((n - 2, 0)).dim
    return np.kron(np.eye(inner, dtype=complex), u_vector(-1)[:, None])


def in_delta_V(space: CahenWallach, phi, tol: float = 1e-10) -> bool:
    """Membership test via ``V . phi = 0``."""
    gens = space.model.generators
    Vmat = gens[1] - gens[0]
    return float(np.max(np.abs(Vmat @ np.asarray(phi)))) <= tol


def cahen_wallach_parallel_family(lam) -> SolutionFamily:
    """Constant spinors valued in ``Delta_V``."""
    space = lam if isinstance(lam, CahenWallach) else CahenWallach(tuple(lam))
    B = delta_V_basis(space.n)
    zero = np.zeros_like(B)
    return SolutionFamily("cw-parallel", space, "w in Delta_V", lambda p: B, lambda p, a: zero, B.shape[1])


def mpm_family(n: int, sign) -> SolutionFamily:
    """The 4-parameter family ``phi_{w1,w2,w3,w4}`` on ``M^n_+`` (sign +1) or ``M^n_-`` (sign -1)."""
    if sign in ("+", "plus"):
        sign = 1
    elif sign in ("-", "minus"):
        sign = -1
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    if n < 3:
        raise ValueError("n >= 3 required")
    space = m_plus(n) if sign == 1 else m_minus(n)
    inner = build_model((n - 2, 0))
    K = inner.dim
    I = np.eye(K, dtype=complex)
    Z = np.zeros((K, K), dtype=complex)
    up, um = u_vector(1)[:, None], u_vector(-1)[:, None]
    if sign == 1:
        f, fp, fpp = math.sinh, math.cosh, math.sinh
    else:
        f, fp, fpp = math.sin, math.cos, lambda s: -math.sin(s)
    # the upper sign of "-+" belongs to M_+
    mp = -sign

    def blocks(p):
        s, t, x = p[0], p[1], p[2:]
        X = vector_matrix(inner, x)
        A1 = np.hstack([X, Z, mp * fp(s) * I, -f(s) * I])
        A2 = np.hstack([-2 * t * I, I, f(s) * X, fp(s) * X])
        return A1, A2

    def basis(p):
        A1, A2 = blocks(p)
        return np.kron(A1, up) + np.kron(A2, um)

    def partial(p, a):
        s, x = p[0], p[2:]
        X = vector_matrix(inner, x)
        if a == 0:
            A1 = np.hstack([Z, Z, mp * fpp(s) * I, -fp(s) * I])
            A2 = np.hstack([Z, Z, fp(s) * X, fpp(s) * X])
        elif a == 1:
            A1 = np.hstack([Z, Z, Z, Z])
            A2 = np.hstack([-2 * I, Z, Z, Z])
        else:
            g = inner.generators[a - 2]
            A1 = np.hstack([g, Z, Z, Z])
            A2 = np.hstack([Z, Z, f(s) * g, fp(s) * g])
        return np.kron(A1, up) + np.kron(A2, um)

    label = "m-plus" if sign == 1 else "m-minus"
    return SolutionFamily(label, space, "(w1, w2, w3, w4) in Delta_{n-2,0}^4", basis, partial, 4 * K)


def mpm_profile(sign: int):
    """``(f, f', f'')`` for the family on ``M^n_+`` (sinh) or ``M^n_-`` (sin)."""
    if sign == 1:
        return math.sinh, math.cosh, math.sinh
    return math.sin, math.cos, lambda s: -math.sin(s)


# --------------------------------------------------------------------------- constant curvature


def _hypersurface_parameter_blocks(space, enforce_parity: bool):
    model = space.model
    N = model.dim
    if space.dim % 2 == 1 and enforce_parity:
        return half_spinor_basis(model, 1), half_spinor_basis(model, -1)
    eye = np.eye(N, dtype=complex)
    return eye, eye


def hypersurface_family(kind: str, n: int, r: float = 1.0, enforce_parity: bool = True) -> SolutionFamily:
    """Restrictions of ``psi_{u,v}(x) = u + x . v`` to ``S^n_1(r)`` or ``H^n_1(r)``.

    For odd ``n`` the parameters satisfy ``u in Delta^+``, ``v in Delta^-``
    unless ``enforce_parity`` is false.
    """
    if n < 3:
        raise ValueError("n >= 3 required")
    if kind in ("sphere", "pseudo-sphere"):
        space = PseudoSphere(n, r)
    elif kind in ("hyperbolic", "pseudo-hyperbolic"):
        space = PseudoHyperbolic(n, r)
    else:
        raise ValueError(f"unknown hypersurface kind {kind!r}")
    model = space.model
    Bu, Bv = _hypersurface_parameter_blocks(space, enforce_parity)
    gens = model.generators

    def basis(p):
        return np.hstack([Bu, _position_matrix(model, p) @ Bv])

    def partial(p, a):
        return np.hstack([np.zeros_like(Bu), gens[a] @ Bv])

    if n % 2 == 1 and enforce_parity:
        desc = "u in Delta^+, v in Delta^-"
    else:
        desc = "u, v in Delta"
    return SolutionFamily(f"{space.kind}", space, desc, basis, partial, Bu.shape[1] + Bv.shape[1])


def covering_map(m: int, r: float, y) -> np.ndarray:
    """``pi_m``: ``(rho cos t, rho sin t, x) -> (rho cos mt, rho sin mt, x)``."""
    y = np.asarray(y, dtype=float)
    rho = math.hypot(y[0], y[1])
    t = math.atan2(y[1], y[0])
    return np.concatenate([[rho * math.cos(m * t), rho * math.sin(m * t)], y[2:]])


def covering_family(m: Optional[int], n: int, r: float = 1.0) -> SolutionFamily:
    """Pull-backs ``psi_{u,v}|_H o pi`` to the chart ``(t, x)`` of a covering of ``H^n_1(r)``.

    ``m = None`` selects the universal covering.  The fields do not depend on
    ``m``; the covering only changes the deck group.
    """
    base = hypersurface_family("hyperbolic", n, r)
    space = Covering(n, r, m)

    def basis(p):
        return base.basis(space.embed(p))

    def partial(p, a):
        J = space.jacobian(p)
        y = space.embed(p)
        return sum(J[A, a] * base.basis_partial(y, A) for A in range(n + 1) if J[A, a] != 0.0)

    return SolutionFamily("covering", space, base.parameter_space, basis, partial, base.dimension)


# --------------------------------------------------------------------------- dispatch


def twistor_family(space: SpaceModel) -> SolutionFamily:
    """The complete twistor family of a simply connected (or covering) model."""
    if isinstance(space, Flat):
        return flat_family(space.n, space.k)
    if isinstance(space, CahenWallach):
        if is_conformally_flat(space):
            if space.sign is None:
                raise ValueError("conformally flat Cahen-Wallach spaces are handled as m-plus / m-minus (lambda = +-1)")
            return mpm_family(space.n, space.sign)
        return cahen_wallach_parallel_family(space)
    if isinstance(space, PseudoSphere):
        return hypersurface_family("sphere", space.dim, space.r)
    if isinstance(space, PseudoHyperbolic):
        return hypersurface_family("hyperbolic", space.dim, space.r)
    if isinstance(space, Covering):
        return covering_family(space.m, space.dim, space.r)
    raise TypeError(f"no twistor family for {space!r}")
