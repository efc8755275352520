"""The case catalog of quotient models and its evaluation into dimension rows.

An entry is ``{"space": {...}, "generators": [...], "label": str,
"expected_q": "1/4" | "none", "confirm": bool}``.  ``"none"`` marks a
quotient without spin structure.  Entries with ``confirm`` also check the
twistor residual of the computed invariant fields.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable

import numpy as np

from .quotients import (
    SpinStructureCase, enumerate_spin_structures, generator_from_dict,
    invariant_dimension,
)
from .solutions import twistor_family
from .spaces import space_from_dict
from .spinops import twistor_residual

__all__ = ["default_catalog", "load_catalog", "dump_catalog", "evaluate_entry", "evaluate_catalog",
           "format_table", "NO_SPIN"]

NO_SPIN = "none"
_ALPHA = 0.7


def _entry(space: dict, gens: list, label: str, expected, confirm: bool = False) -> dict:
    doc = {"space": space, "generators": gens, "label": label, "expected_q": str(expected)}
    if confirm:
        doc["confirm"] = True
    return doc


def _g(kind: str, sign: int, **params) -> dict:
    return {"type": kind, **params, "sign": "+" if sign == 1 else "-"}


def _cw(lam) -> dict:
    return {"kind": "cahen-wallach", "lambda": [float(v) for v in lam]}


def _signed(space, kinds, label, rule, confirm=False):
    """One entry per sign assignment; ``rule(signs)`` gives the expected q."""
    out = []
    for signs in _sign_products(len(kinds)):
        gens = [_g(kind, s, **params) for (kind, params), s in zip(kinds, signs)]
        tag = "".join("+" if s == 1 else "-" for s in signs)
        out.append(_entry(space, gens, f"{label}/{tag}", rule(signs), confirm))
    return out


def _sign_products(count):
    if count == 0:
        return [()]
    return [(s,) + rest for s in (1, -1) for rest in _sign_products(count - 1)]


def _non_conformally_flat(n: int) -> list:
    half = Fraction(1, 2)
    rows = []
    lam1 = [2.0] + [-1.0] * (n - 3)
    rows.append(_entry(_cw(lam1), [], f"cw/simply-connected/n={n}", half))
    rows += _signed(_cw(lam1), [("t-shift", {"alpha": _ALPHA})], f"cw/case1/n={n}",
                    lambda s: half if s[0] == 1 else 0)

    # lambda_i = -k_i^2, m = k gives beta = pi
    k2 = [1, 3] + [2] * (n - 4)
    rows += _signed(_cw([-k * k for k in k2]), [("cw-lattice", {"m": k2})], f"cw/case2/s=2mod4/n={n}",
                    lambda s: 0)
    k0 = [1, 2] + [2] * (n - 4)
    m0 = [2 * k for k in k0]
    rows += _signed(_cw([-k * k for k in k0]), [("cw-lattice", {"m": m0})], f"cw/case2/s=0/n={n}",
                    lambda s: half if s[0] == 1 else 0)
    rows += _signed(_cw([-k * k for k in k2]), [("t-shift", {"alpha": _ALPHA})], f"cw/case2/A0a/n={n}",
                    lambda s: half if s[0] == 1 else 0)
    rows += _signed(_cw([-k * k for k in k2]), [("cw-lattice", {"m": k2}), ("t-shift", {"alpha": _ALPHA})],
                    f"cw/case2/Ama/s=2mod4/n={n}", lambda s: 0)
    if n >= 6:
        k4 = [1, 3, 5, 7] + [2] * (n - 6)
        quarter = Fraction(1, 4)
        rows += _signed(_cw([-k * k for k in k4]), [("cw-lattice", {"m": k4})], f"cw/case2/s=0mod4/n={n}",
                        lambda s: quarter)
        rows += _signed(_cw([-k * k for k in k4]), [("cw-lattice", {"m": k4}), ("t-shift", {"alpha": _ALPHA})],
                        f"cw/case2/Ama/s=0mod4/n={n}", lambda s: quarter if s[1] == 1 else 0)
    return rows


def _conformally_flat(n: int) -> list:
    plus = {"kind": "m-plus", "n": n}
    minus = {"kind": "m-minus", "n": n}
    shift = ("t-shift", {"alpha": _ALPHA})
    rows = [
        _entry(plus, [], f"m-plus/simply-connected/n={n}", 2),
        _entry(minus, [], f"m-minus/simply-connected/n={n}", 2),
    ]
    rows += _signed(plus, [shift], f"m-plus/A_alpha/n={n}", lambda s: Fraction(3, 2) if s[0] == 1 else 0)
    rows += _signed(minus, [("cw-lattice", {"m": 2})], f"m-minus/m=2/n={n}", lambda s: 2 if s[0] == 1 else 0)
    # open question: "m even, alpha != 0" is read as the M_+ case; confirmed by residual
    rows += _signed(minus, [("cw-lattice", {"m": 2}), shift], f"m-minus/m=2,alpha/n={n}",
                    lambda s: Fraction(3, 2) if s == (1, 1) else 0, confirm=True)
    if n % 2 == 0:
        good = n % 4 == 2
        rows += _signed(minus, [("cw-lattice", {"m": 1})], f"m-minus/m=1/n={n}",
                        lambda s: 1 if good else 0)
        rows += _signed(minus, [("cw-lattice", {"m": 1}), shift], f"m-minus/m=1,alpha/n={n}",
                        lambda s: Fraction(3, 4) if good and s[1] == 1 else 0)
    return rows


def _constant_curvature(n: int) -> list:
    sphere = {"kind": "pseudo-sphere", "n": n, "r": 1.0}
    rows = [
        _entry(sphere, [], f"sphere/simply-connected/n={n}", 2),
        _entry({"kind": "covering", "n": n, "r": 1.0, "m": None}, [], f"universal-cover/n={n}", 2),
    ]
    if n % 2 == 1:
        if n % 4 == 1:
            rows += _signed(sphere, [("antipodal", {})], f"sphere/pm-I/n={n}", lambda s: 1)
        else:
            rows.append(_entry(sphere, [_g("antipodal", 1)], f"sphere/pm-I/n={n}", NO_SPIN))
    for m in (1, 2, 3):
        cover = {"kind": "covering", "n": n, "r": 1.0, "m": m}
        rows += _signed(cover, [("deck", {})], f"N_m/m={m}/n={n}", lambda s: 2 if s[0] == 1 else 0)
        if n % 2 == 0:
            continue
        if n % 4 == 1:
            rows.append(_entry(cover, [_g("deck", 1), _g("covering-involution", 1)],
                               f"N_m/pm-I/m={m}/n={n}", NO_SPIN))
            continue

        def rule(s, m=m):
            eps, delta = s
            if eps == -1:
                return 0
            if delta == 1:
                return 1
            return 1 if m % 2 else 0

        rows += _signed(cover, [("deck", {}), ("covering-involution", {})], f"N_m/pm-I/m={m}/n={n}", rule)
    return rows


def default_catalog(n_values: Iterable[int] = range(4, 8)) -> list:
    """Every tabulated case for the requested dimensions (catalog order is fixed)."""
    rows = []
    for n in n_values:
        if n >= 4:
            rows += _non_conformally_flat(n)
        if n >= 3:
            rows += _conformally_flat(n)
            rows += _constant_curvature(n)
    return rows


def load_catalog(path) -> list:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, list):
        raise ValueError("catalog must be a JSON array of case entries")
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict) or "space" not in entry:
            raise ValueError(f"catalog entry {i} lacks a 'space' object")
    return doc


def dump_catalog(entries: list, path) -> None:
    with open(path, "w") as fh:
        json.dump(entries, fh, indent=1)


def _normalize_q(value) -> str:
    if value is None or str(value) == NO_SPIN:
        return NO_SPIN
    return str(Fraction(str(value)))


def _confirm_residual(family, basis, rng, count: int = 3) -> float:
    if basis.shape[1] == 0:
        return 0.0
    field = family.as_field() @ basis
    pts = family.space.sample_points(rng, count)
    return max(twistor_residual(family.space, field, p).max_norm for p in pts)


def evaluate_entry(entry: dict, random_state: int = 0, tol_res: float = 1e-5) -> dict:
    """Evaluate one catalog entry into ``{label, n, dim, q, expected_q, pass}``."""
    from .estimators import InvariantSubspace

    space = space_from_dict(entry["space"])
    gens = tuple(generator_from_dict(space, g) for g in entry.get("generators", []))
    label = entry.get("label", "")
    expected = _normalize_q(entry.get("expected_q"))
    row = {"label": label, "n": space.n, "dim": None, "q": NO_SPIN, "expected_q": expected}
    # orientability is checked on the unsigned generators
    structures = enumerate_spin_structures(space, [g.with_sign(1) for g in gens], label, seed=random_state)
    if gens and not structures:
        row["pass"] = expected == NO_SPIN
        return row
    case = SpinStructureCase(space, gens, label)
    family = twistor_family(space)
    dim = invariant_dimension(case, family, random_state=random_state)
    q = Fraction(dim, 2 ** (space.n // 2))
    row.update(dim=dim, q=str(q))
    ok = str(q) == expected
    if entry.get("confirm"):
        est = InvariantSubspace(family=family, generators=gens, random_state=random_state).fit()
        res = _confirm_residual(family, est.basis_, np.random.default_rng(random_state))
        row["residual"] = res
        ok = ok and res <= tol_res
    row["pass"] = ok
    return row


def evaluate_catalog(entries: list, random_state: int = 0) -> list:
    return [evaluate_entry(e, random_state) for e in entries]


def format_table(rows: list) -> str:
    if not rows:
        return "(empty catalog)"
    head = ("label", "n", "dim", "q", "expected", "verdict")
    body = [(r["label"], str(r["n"]), "-" if r["dim"] is None else str(r["dim"]), r["q"], r["expected_q"],
             "pass" if r["pass"] else "FAIL") for r in rows]
    widths = [max(len(h), *(len(b[i]) for b in body)) for i, h in enumerate(head)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(b, widths)) for b in body]
    return "\n".join(lines)
