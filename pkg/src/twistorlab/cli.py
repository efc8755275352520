"""Command-line entry point ``twistorlab``.

Exit status: 0 when every check passes, 1 when any check fails, 2 for
configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .clifford import MAX_DIMENSION, Signature, _all_deltas, build_model, dump_generators, u_basis
from .solutions import cahen_wallach_parallel_family, twistor_family
from .spaces import CahenWallach, Flat, space_from_dict
from .spinops import NotTwistorError, integrability_check, twistor_residual

TOL_ALG = 1e-12
TOL_RES = 1e-6
TOL_FD = 1e-5

KINDS = ("flat", "cahen-wallach", "m-plus", "m-minus", "pseudo-sphere", "pseudo-hyperbolic", "covering")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    space: Optional[str] = None
    lam: Optional[tuple] = None
    n_values: tuple = ()
    k: Optional[int] = None
    r: float = 1.0
    m: Optional[int] = None
    samples: int = 20
    seed: int = 0
    tol_alg: float = TOL_ALG
    tol_res: float = TOL_RES
    tol_fd: float = TOL_FD
    fmt: str = "text"
    catalog: Optional[str] = None
    out: Optional[str] = None
    dump: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigError("--samples must be at least 1")
        for name in ("tol_alg", "tol_res", "tol_fd"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")
        if self.fmt not in ("text", "json"):
            raise ConfigError("--format must be text or json")


def parse_n_range(text: str) -> tuple:
    """``"5"`` -> (5,), ``"4..7"`` -> (4, 5, 6, 7)."""
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split("..", 1))
            if hi < lo:
                raise ConfigError(f"empty range {text!r}")
            return tuple(range(lo, hi + 1))
        return (int(text),)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse --n {text!r}") from None


def parse_lambda(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"cannot parse --lambda {text!r}") from None


def parse_m(text: str) -> Optional[int]:
    if text.lower() in ("inf", "universal", "none"):
        return None
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"cannot parse --m {text!r}") from None


# --------------------------------------------------------------------------- verify


def _spaces_for(config: RunConfig) -> list:
    kind = config.space
    if kind is None:
        raise ConfigError("verify needs --space")
    if kind not in KINDS:
        raise ConfigError(f"unknown space kind {kind!r}; choose from {', '.join(KINDS)}")
    if kind == "cahen-wallach":
        if not config.lam:
            raise ConfigError("cahen-wallach needs --lambda")
        n = len(config.lam) + 2
        if config.n_values and config.n_values != (n,):
            raise ConfigError(f"--lambda has {len(config.lam)} entries, so n = {n}")
        return [space_from_dict({"kind": kind, "lambda": list(config.lam)})]
    if not config.n_values:
        raise ConfigError(f"{kind} needs --n")
    out = []
    for n in config.n_values:
        doc = {"kind": kind, "n": n, "k": config.k or 0, "r": config.r, "m": config.m}
        out.append(space_from_dict(doc))
    return out


def _family_for(space):
    if isinstance(space, CahenWallach) and space.label is None:
        return cahen_wallach_parallel_family(space)
    return twistor_family(space)


def _verify_space(space, config: RunConfig, rng) -> dict:
    family = _family_for(space)
    field_ = family.as_field()
    pts = space.sample_points(rng, config.samples)
    residuals = [twistor_residual(space, field_, p).max_norm for p in pts]
    analytic = not hasattr(space, "graph_height")
    tol = config.tol_res if analytic else config.tol_fd
    worst = float(max(residuals))
    check = {
        "space": space.to_dict(),
        "family": family.name,
        "dimension": family.dimension,
        "samples": len(pts),
        "residual_max": worst,
        "tol": tol,
        "residual_pass": worst <= tol,
    }
    ok = check["residual_pass"]
    if isinstance(space, (CahenWallach, Flat)):
        sch = wey = 0.0
        int_ok = True
        for p in pts[: min(len(pts), 5)]:
            params = rng.standard_normal(family.dimension) + 1j * rng.standard_normal(family.dimension)
            try:
                rep = integrability_check(space, family.instantiate(params), p, tol=config.tol_fd,
                                          twistor_tol=config.tol_res)
            except NotTwistorError:
                int_ok = False
                break
            sch, wey = max(sch, rep.schouten_defect), max(wey, rep.weyl_defect)
            int_ok = int_ok and rep.ok
        check["integrability"] = {"schouten_defect": sch, "weyl_defect": wey, "tol": config.tol_fd,
                                  "pass": int_ok}
        ok = ok and int_ok
    check["pass"] = bool(ok)
    return check


def run_verify(config: RunConfig) -> dict:
    rng = np.random.default_rng(config.seed)
    checks = [_verify_space(s, config, rng) for s in _spaces_for(config)]
    return {"command": "verify", "seed": config.seed, "checks": checks, "pass": all(c["pass"] for c in checks)}


def _verify_text(report: dict) -> str:
    lines = []
    for c in report["checks"]:
        sp = c["space"]
        desc = ", ".join(f"{k}={v}" for k, v in sp.items() if k != "kind")
        line = (f"{sp['kind']}({desc}) family={c['family']} dim={c['dimension']} "
                f"residual_max={c['residual_max']:.3e} (tol {c['tol']:.0e})")
        if "integrability" in c:
            it = c["integrability"]
            line += f" schouten={it['schouten_defect']:.3e} weyl={it['weyl_defect']:.3e}"
        lines.append(f"{'PASS' if c['pass'] else 'FAIL'}  {line}")
    lines.append("all checks passed" if report["pass"] else "some checks FAILED")
    return "\n".join(lines)


# --------------------------------------------------------------------------- dim-table


def run_dim_table(config: RunConfig) -> dict:
    from .catalog import default_catalog, evaluate_catalog, load_catalog

    if config.catalog:
        try:
            entries = load_catalog(config.catalog)
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            raise ConfigError(f"cannot read catalog {config.catalog}: {exc}") from None
    else:
        entries = default_catalog(config.n_values or range(4, 8))
    try:
        rows = evaluate_catalog(entries, random_state=config.seed)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed catalog entry: {exc}") from None
    return {"command": "dim-table", "rows": rows, "pass": all(r["pass"] for r in rows)}


# --------------------------------------------------------------------------- clifford-check


def _clifford_report(n: int, k: int, dump: bool) -> dict:
    model = build_model((n, k))
    U = np.stack([u_basis(model, d) for d in _all_deltas(model.sig.half)], axis=1)
    ortho = float(np.max(np.abs(U.conj().T @ U - np.eye(model.dim))))
    row = {"n": n, "k": k, "spinor_dim": model.dim, "anticommutator_defect": model.anticommutator_defect(),
           "u_basis_orthonormality_defect": ortho}
    devs = [row["anticommutator_defect"], ortho]
    if n % 2 == 0:
        P, M = model.plus_projector, model.minus_projector
        rank_p = int(round(np.trace(P).real))
        rank_m = int(round(np.trace(M).real))
        proj = max(float(np.max(np.abs(P @ P - P))), float(np.max(np.abs(M @ M - M))),
                   float(np.max(np.abs(P + M - np.eye(model.dim)))))
        row.update(half_spinor_dims=[rank_p, rank_m], projector_defect=proj)
        devs.append(proj)
        row["half_dims_ok"] = rank_p == rank_m == model.dim // 2
    if dump:
        row["generators"] = dump_generators(model)
    row["max_deviation"] = max(devs)
    return row


def run_clifford_check(config: RunConfig) -> dict:
    ns = config.n_values or tuple(range(1, 11))
    for n in ns:
        if n > MAX_DIMENSION:
            raise ConfigError(f"n={n} exceeds the supported maximum {MAX_DIMENSION}")
        if n < 1:
            raise ConfigError(f"n must be positive, got {n}")
    ks = (config.k,) if config.k is not None else (0, 1, 2)
    rows = []
    for n in ns:
        for k in ks:
            try:
                Signature(n, k)
            except ValueError:
                if config.k is not None:
                    raise ConfigError(f"invalid signature (n={n}, k={k})") from None
                continue
            row = _clifford_report(n, k, config.dump)
            row["pass"] = row["max_deviation"] <= config.tol_alg and row.get("half_dims_ok", True)
            rows.append(row)
    return {"command": "clifford-check", "tol": config.tol_alg, "rows": rows,
            "pass": all(r["pass"] for r in rows)}


def _clifford_text(report: dict) -> str:
    lines = []
    for r in report["rows"]:
        extra = f" half={r['half_spinor_dims']}" if "half_spinor_dims" in r else ""
        lines.append(f"{'PASS' if r['pass'] else 'FAIL'}  n={r['n']} k={r['k']} dim={r['spinor_dim']} "
                     f"max_deviation={r['max_deviation']:.3e}{extra}")
    lines.append("all checks passed" if report["pass"] else "some checks FAILED")
    return "\n".join(lines)


# --------------------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistorlab",
                                     description="Numerical checks for twistor spinors on Lorentzian symmetric spaces")
    parser.add_argument("command", choices=("verify", "dim-table", "clifford-check"))
    parser.add_argument("--space", choices=KINDS)
    parser.add_argument("--lambda", dest="lam", help="comma-separated lambda_j (cahen-wallach)")
    parser.add_argument("--n", help="dimension N or inclusive range N..M")
    parser.add_argument("--k", type=int, help="number of timelike directions")
    parser.add_argument("--r", type=float, default=1.0, help="radius for constant-curvature models")
    parser.add_argument("--m", default="inf", help="covering index m, or 'inf' for the universal covering")
    parser.add_argument("--samples", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol-alg", type=float, default=TOL_ALG)
    parser.add_argument("--tol-res", type=float, default=TOL_RES)
    parser.add_argument("--tol-fd", type=float, default=TOL_FD, help="tolerance for finite-difference paths")
    parser.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    parser.add_argument("--catalog", help="case catalog JSON for dim-table")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--dump", action="store_true", help="include generator matrices (clifford-check)")
    return parser


def config_from_args(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        space=args.space,
        lam=parse_lambda(args.lam) if args.lam else None,
        n_values=parse_n_range(args.n) if args.n else (),
        k=args.k,
        r=args.r,
        m=parse_m(args.m),
        samples=args.samples,
        seed=args.seed,
        tol_alg=args.tol_alg,
        tol_res=args.tol_res,
        tol_fd=args.tol_fd,
        fmt=args.fmt,
        catalog=args.catalog,
        out=args.out,
        dump=args.dump,
    )


def render(report: dict, fmt: str) -> str:
    from .catalog import format_table

    if fmt == "json":
        return json.dumps(report, indent=1)
    if report["command"] == "verify":
        return _verify_text(report)
    if report["command"] == "dim-table":
        return format_table(report["rows"])
    return _clifford_text(report)


RUNNERS = {"verify": run_verify, "dim-table": run_dim_table, "clifford-check": run_clifford_check}


def _join_negative_values(argv: list) -> list:
    # argparse reads "-1,-4" as an option; glue value-taking flags to negative numbers
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if a in ("--lambda", "--r") and nxt is not None and nxt[:1] == "-" and nxt[1:2].isdigit():
            out.append(f"{a}={nxt}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        # argparse exits 2 on bad usage and 0 after --help
        return 2 if exc.code else 0
    try:
        config = config_from_args(args)
        report = RUNNERS[config.command](config)
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"twistorlab: error: {exc}", file=sys.stderr)
        return 2
    text = render(report, config.fmt)
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
