"""Discrete quotients, spin-structure lifts and twistor-spinor counts.

A spinor field on ``M~/A`` with spin structure ``eps`` is a field ``phi`` on
``M~`` with ``phi(gamma(y)) = eps(gamma) phi(y)`` for every generator.  All
families are finite-dimensional and linear, so the invariant fields form
the null space of a sampled linear system (see :class:`InvariantSubspace`).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .clifford import CliffordModel, omega_element
from .spaces import (
    CahenWallach, Covering, SpaceModel, _Hypersurface,
    space_from_dict,
)

__all__ = [
    "GroupGenerator", "SpinStructureCase", "NonOrientableError", "FamilyNotPreservedError",
    "t_shift", "cw_lattice", "antipodal", "deck", "covering_involution", "generator_from_dict",
    "normalized_volume", "orientation_sign", "isometry_defect", "lift_defect", "family_defect",
    "has_spin_lift", "enumerate_spin_structures", "invariant_dimension", "q_value",
    "omega_eigenspace_dims",
]


class NonOrientableError(ValueError):
    """The quotient is not orientable, so it carries no spin structure."""


class FamilyNotPreservedError(RuntimeError):
    """A generator does not map the solution family into itself."""


@dataclass(frozen=True, eq=False)
class GroupGenerator:
    """Isometry ``y -> gamma(y)`` of the covering model together with a spinor lift.

    ``jacobian`` is the (constant) linear part in point coordinates; for
    hypersurfaces those are ambient coordinates.  ``order`` is 2 for
    involutions, ``None`` for generators of infinite order.
    """

    name: str
    kind: str
    point_action: Callable
    jacobian: np.ndarray
    base_lift: np.ndarray
    sign: int = 1
    order: Optional[int] = None
    params: dict = field(default_factory=dict)
    covers_differential: bool = True

    def __call__(self, p) -> np.ndarray:
        return self.point_action(np.asarray(p, dtype=float))

    @property
    def lift(self) -> np.ndarray:
        return self.sign * self.base_lift

    def with_sign(self, sign: int) -> "GroupGenerator":
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign!r}")
        return replace(self, sign=sign)

    @property
    def label(self) -> str:
        return f"{self.name}{'+' if self.sign == 1 else '-'}"

    def to_dict(self) -> dict:
        return {"type": self.kind, **self.params, "sign": self.sign}


# --------------------------------------------------------------------------- generator builders


def normalized_volume(model: CliffordModel) -> np.ndarray:
    """Volume element rescaled to act as ``+1`` on ``Delta^+`` when it squares to ``+1``.

    With ``omega^2 = -1`` there is no real rescaling and ``omega`` is returned
    unchanged; it then fails the involution test of :func:`has_spin_lift`.
    """
    if model.n % 2:
        raise ValueError("the volume element is only normalized for even dimension")
    vol = np.asarray(model.volume)
    c = 1j ** ((model.n // 2 + model.k) % 4)
    if abs(c.imag) > 0.5:
        return vol
    return vol / c.real


def t_shift(space: SpaceModel, alpha: float) -> GroupGenerator:
    """``gamma_alpha(s, t, x) = (s, t + alpha, x)`` with lift ``1``."""
    if not isinstance(space, CahenWallach):
        raise TypeError("t-shifts act on Cahen-Wallach spaces")
    if alpha == 0:
        raise ValueError("alpha must be nonzero for a discrete generator")
    d = space.point_dim
    shift = np.zeros(d)
    shift[1] = alpha
    return GroupGenerator("gamma_alpha", "t-shift", lambda p: p + shift, np.eye(d),
                          space.model.identity, params={"alpha": float(alpha)})


def cw_lattice(space: CahenWallach, m, rtol: float = 1e-9) -> GroupGenerator:
    """``gamma_{m,0}(s, t, x) = (s + beta, t, (-1)^{m_i} x_i)`` with lift ``omega_m``.

    Requires ``lambda_i = -k_i^2 < 0`` and a common ``beta = pi m_i / k_i``.
    An integer ``m`` is broadcast to ``(m, ..., m)``.
    """
    if not isinstance(space, CahenWallach):
        raise TypeError("lattice generators act on Cahen-Wallach spaces")
    lam = np.asarray(space.lam, dtype=float)
    if np.any(lam >= 0):
        raise ValueError("lattice generators need all lambda_i < 0")
    mvec = np.full(len(lam), int(m)) if np.isscalar(m) else np.asarray(m, dtype=int)
    if mvec.shape != lam.shape:
        raise ValueError(f"m must have {len(lam)} entries")
    if not np.any(mvec):
        raise ValueError("m = 0 gives the identity")
    k = np.sqrt(-lam)
    betas = math.pi * mvec / k
    beta = float(betas[0])
    if not np.allclose(betas, beta, rtol=rtol, atol=rtol):
        raise ValueError(f"inconsistent beta = pi m_i / k_i: {betas.tolist()}")
    # an odd count of flipped x_i is caught as orientation reversal
    odd = [i + 3 for i, mi in enumerate(mvec) if mi % 2]
    signs = np.array([1.0, 1.0] + [(-1.0) ** int(mi) for mi in mvec])
    shift = np.zeros(space.point_dim)
    shift[0] = beta

    def act(p):
        return signs * p + shift

    lift = omega_element(space.model, odd)
    return GroupGenerator("gamma_m", "cw-lattice", act, np.diag(signs), lift,
                          params={"m": [int(v) for v in mvec]})


def antipodal(space: _Hypersurface) -> GroupGenerator:
    """``x -> -x`` on ``S^n_1(r)`` or ``H^n_1(r)`` with lift the normalized ambient volume form."""
    if not isinstance(space, _Hypersurface):
        raise TypeError("the antipodal map acts on pseudo-spheres and pseudo-hyperbolic spaces")
    d = space.point_dim
    if space.n % 2 == 0:
        raise NonOrientableError("x -> -x reverses orientation for even n")
    return GroupGenerator("minus_I", "antipodal", lambda p: -p, -np.eye(d),
                          normalized_volume(space.model), order=2)


def deck(space: Covering) -> GroupGenerator:
    """Deck transformation ``(t, x) -> (t + 2 pi m, x)`` of ``N^n_m``, lift ``1``."""
    if not isinstance(space, Covering) or space.m is None:
        raise TypeError("deck transformations need a finite covering N^n_m")
    d = space.point_dim
    shift = np.zeros(d)
    shift[0] = 2 * math.pi * space.m
    return GroupGenerator("eps_m", "deck", lambda p: p + shift, np.eye(d), space.model.identity)


def covering_involution(space: Covering) -> GroupGenerator:
    """``(t, x) -> (t + m pi, -x)`` covering ``-I``, lift the normalized volume form."""
    if not isinstance(space, Covering) or space.m is None:
        raise TypeError("the involution needs a finite covering N^n_m")
    if space.n % 2 == 0:
        raise NonOrientableError("N^n_m / {+-I} is not orientable for even n")
    d = space.point_dim
    signs = np.array([1.0] + [-1.0] * (d - 1))
    shift = np.zeros(d)
    shift[0] = space.m * math.pi
    # for even m the point map covers (x0, x1, x) -> (x0, x1, -x), not -I, so the
    # volume-form lift is the prescribed one rather than a lift of the differential
    return GroupGenerator("delta", "covering-involution", lambda p: signs * p + shift,
                          np.diag(signs), normalized_volume(space.model), order=2,
                          covers_differential=space.m % 2 == 1)


def generator_from_dict(space: SpaceModel, doc: dict) -> GroupGenerator:
    """Build a signed generator from ``{"type": ..., "sign": "+"|"-", ...}``."""
    kind = doc.get("type")
    sign = doc.get("sign", 1)
    sign = {"+": 1, "-": -1}.get(sign, sign)
    if kind == "t-shift":
        gen = t_shift(space, float(doc["alpha"]))
    elif kind == "cw-lattice":
        gen = cw_lattice(space, doc["m"])
    elif kind == "antipodal":
        gen = antipodal(space)
    elif kind == "deck":
        gen = deck(space)
    elif kind == "covering-involution":
        gen = covering_involution(space)
    else:
        raise ValueError(f"unknown generator type {kind!r}")
    return gen.with_sign(int(sign))


# --------------------------------------------------------------------------- geometric checks


def orientation_sign(space: SpaceModel, gen: GroupGenerator, p) -> int:
    """+1 if ``gen`` preserves orientation at ``p``."""
    p = np.asarray(p, dtype=float)
    det = np.linalg.det(gen.jacobian)
    if isinstance(space, _Hypersurface):
        q = gen(p)
        eta_img = gen.jacobian @ space.normal(p)
        det *= space.kappa * (eta_img @ space.ambient_metric @ space.normal(q))
    return 1 if det > 0 else -1


def isometry_defect(space: SpaceModel, gen: GroupGenerator, p) -> float:
    """``max |gamma^* g - g|`` at ``p`` (hypersurfaces: ambient metric and level set)."""
    p = np.asarray(p, dtype=float)
    q = gen(p)
    J = gen.jacobian
    if isinstance(space, _Hypersurface):
        G = space.ambient_metric
        return max(float(np.max(np.abs(J.T @ G @ J - G))), abs(space.level(q) - space.level(p)))
    return float(np.max(np.abs(J.T @ space.metric_at(q) @ J - space.metric_at(p))))


def lift_defect(space: SpaceModel, gen: GroupGenerator, p) -> float:
    """``max_X |L X L^{-1} - (d gamma X)|`` over a frame, as Clifford matrices."""
    p = np.asarray(p, dtype=float)
    q = gen(p)
    L = gen.lift
    Linv = np.linalg.inv(L)
    worst = 0.0
    for X in space.frame_at(p).vectors:
        lhs = L @ space.clifford(X, p) @ Linv
        rhs = space.clifford(gen.jacobian @ X, q)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def family_defect(family, gen: GroupGenerator, points) -> float:
    """Relative least-squares residual of ``L^{-1} M(gamma y) = M(y) R`` over ``points``.

    Zero iff ``gen`` maps the family into itself (at the sampled points).
    """
    Linv = np.linalg.inv(gen.lift)
    lhs = np.vstack([family.evaluate(y) for y in points])
    rhs = np.vstack([Linv @ family.evaluate(gen(y)) for y in points])
    R, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    scale = max(1.0, float(np.max(np.abs(rhs))))
    return float(np.max(np.abs(lhs @ R - rhs))) / scale


def has_spin_lift(gen: GroupGenerator, tol: float = 1e-10) -> bool:
    """Involutions need a lift squaring to ``+1``; infinite-order generators always lift."""
    if gen.order != 2:
        return True
    L = gen.base_lift
    return float(np.max(np.abs(L @ L - np.eye(L.shape[0])))) <= tol


# --------------------------------------------------------------------------- spin structures


@dataclass(frozen=True, eq=False)
class SpinStructureCase:
    space: SpaceModel
    generators: tuple
    label: str = ""

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def signs(self) -> tuple:
        return tuple(g.sign for g in self.generators)

    def to_dict(self) -> dict:
        return {"space": self.space.to_dict(), "generators": [g.to_dict() for g in self.generators],
                "label": self.label}

    @classmethod
    def from_dict(cls, doc: dict) -> "SpinStructureCase":
        space = space_from_dict(doc["space"])
        gens = tuple(generator_from_dict(space, g) for g in doc.get("generators", []))
        return cls(space, gens, doc.get("label", ""))


def _check_orientable(space, generators, rng):
    p = space.sample_points(rng, 1)[0]
    for g in generators:
        if orientation_sign(space, g, p) < 0:
            raise NonOrientableError(f"{g.name} reverses orientation on {space.kind}")


def enumerate_spin_structures(space: SpaceModel, generators: Sequence[GroupGenerator],
                              label: str = "", seed: int = 0) -> list:
    """All sign assignments ``+-lift`` per generator; empty if no spin structure exists.

    Raises :class:`NonOrientableError` for non-orientable quotients.
    """
    generators = list(generators)
    _check_orientable(space, generators, np.random.default_rng(seed))
    if not all(has_spin_lift(g) for g in generators):
        return []
    cases = []
    for signs in itertools.product((1, -1), repeat=len(generators)):
        gens = tuple(g.with_sign(s) for g, s in zip(generators, signs))
        tag = ",".join(g.label for g in gens)
        cases.append(SpinStructureCase(space, gens, f"{label}[{tag}]" if label else tag))
    return cases


def invariant_dimension(case: SpinStructureCase, family=None, random_state=0,
                        rtol: float = 1e-8, n_extra: int = 5, check_family: bool = True) -> int:
    """Dimension of the ``eps``-invariant subspace of ``family`` (default: the twistor family)."""
    from .estimators import InvariantSubspace
    from .solutions import twistor_family

    if family is None:
        family = twistor_family(case.space)
    est = InvariantSubspace(family=family, generators=case.generators, rtol=rtol,
                            n_extra=n_extra, random_state=random_state).fit()
    if check_family:
        pts = est.points_[: min(len(est.points_), 8)]
        for g in case.generators:
            if g.covers_differential and family_defect(family, g, pts) > 1e-8:
                raise FamilyNotPreservedError(f"{g.name} does not preserve the {family.name} family")
    if not est.rank_stable_:
        raise RuntimeError("invariance rank changed after adding sample points; sampling is degenerate")
    return est.dimension_


def q_value(case: SpinStructureCase, family=None, **kwargs) -> Fraction:
    """``dim T / 2^[n/2]`` as an exact rational."""
    dim = invariant_dimension(case, family, **kwargs)
    return Fraction(dim, 2 ** (case.n // 2))


def omega_eigenspace_dims(model: CliffordModel, indices, tol: float = 1e-8) -> tuple:
    """Dimensions of the ``+1/-1`` (``s = 0 mod 4``) or ``+i/-i`` (``s = 2 mod 4``) eigenspaces."""
    indices = list(indices)
    if len(indices) % 2:
        raise ValueError("omega eigenspaces need an even number of indices")
    for i in indices:
        if model.eps[i - 1] < 0:
            raise ValueError(f"index {i} is timelike")
    w = omega_element(model, indices)
    target = 1.0 if len(indices) % 4 == 0 else 1j
    ev = np.linalg.eigvals(w)
    plus = int(np.sum(np.abs(ev - target) < tol))
    minus = int(np.sum(np.abs(ev + target) < tol))
    if plus + minus != model.dim:
        raise RuntimeError("omega is not diagonalizable with the expected spectrum")
    return plus, minus
