"""The ``neron`` command line tool.

Exit status is 0 on success, 2 for invalid input (including fibres that fail
validation) and 1 for anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any, Callable, Sequence

from . import __version__
from .abelian import IntMatrix, smith_normal_form
from .graphs import h1
from .neron import (
    FibreError,
    ModulusIncidence,
    SpecialFibre,
    component_group_J,
    component_group_Jm,
    tori_component_group,
)
from .modular import (
    CuspidalDivisor,
    all_cusps,
    closed_form_X0pM,
    closed_form_phiJ,
    cusps,
    hecke_matrix,
    x0p2_fibre,
    x0pM_fibre,
)
from .supersingular import (
    SUPPORTED,
    brandt,
    counts,
    hecke_on_char_X0p,
    supersingular_js,
    x0p_gamma_basis,
    x0p_graph,
)
from .supersingular.fp2 import is_prime


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    p: int | None = None
    M: int | None = None
    N: int | None = None
    ell: int | None = None
    modulus: str | None = None
    input: str | None = None
    modulus_input: str | None = None
    output: str | None = None
    format: str = "table"
    p_max: int = 97
    Ms: tuple[int, ...] = (1,)
    jobs: int = 1

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        ell = getattr(ns, "hecke", None) or getattr(ns, "ell", None)
        return cls(
            command=ns.command,
            p=getattr(ns, "p", None),
            M=getattr(ns, "M", None),
            N=getattr(ns, "N", None),
            ell=ell,
            modulus=getattr(ns, "modulus", None),
            input=getattr(ns, "input", None),
            modulus_input=getattr(ns, "modulus_input", None),
            output=ns.output,
            format=ns.format,
            p_max=getattr(ns, "p_max", 97),
            Ms=tuple(getattr(ns, "Ms", None) or (1,)),
            jobs=getattr(ns, "jobs", 1),
        )


# --- reports ----------------------------------------------------------------

def _matrix_table(M: IntMatrix, row_labels: Sequence[str] | None = None) -> list[str]:
    rows = M.to_lists()
    if not rows:
        return ["  (empty)"]
    w = max(len(str(x)) for r in rows for x in r) if M.cols else 1
    lw = max((len(x) for x in row_labels), default=0) if row_labels else 0
    out = []
    for i, r in enumerate(rows):
        head = f"{row_labels[i]:<{lw}}  " if row_labels else ""
        out.append("  " + head + " ".join(f"{x:>{w}}" for x in r))
    return out


def _group_report(f: SpecialFibre, m: ModulusIncidence | None) -> dict:
    if m is None:
        phi = component_group_J(f).group
        return {"phi_J": str(phi), "phi_J_data": phi.to_dict()}
    jm = component_group_Jm(f, m)
    quotient = jm.phi_J()
    images = jm.torus_images
    sub_rank = smith_normal_form(images).rank if images.rows else 0
    return {
        "phi_Jm": str(jm.group),
        "phi_Jm_data": jm.group.to_dict(),
        "phi_T": str(tori_component_group(m.e)),
        "torus_points": list(m.labels),
        "torus_images": images.T.to_lists(),
        "torus_image_snf": [d for d in smith_normal_form(images).diagonal()],
        "torus_image_rank": sub_rank,
        "phi_J": str(quotient),
        "phi_J_data": quotient.to_dict(),
    }


def cmd_component_group(cfg: RunConfig) -> dict:
    if cfg.command == "x0pM":
        _need(cfg.p, "--p")
        M = cfg.M or 1
        if cfg.modulus not in (None, "infty0"):
            raise UsageError("x0pM supports --modulus infty0 only")
        c = counts(cfg.p, M)
        data = x0pM_fibre(cfg.p, M, c)
        rep = {"model": "x0pM", "p": cfg.p, "M": M, "counts": list(c), "components": list(data.fibre.labels)}
        rep.update(_group_report(data.fibre, data.modulus))
        return rep
    if cfg.command == "x0p2":
        _need(cfg.p, "--p")
        data = x0p2_fibre(cfg.p)
        which = cfg.modulus or "full"
        if which not in ("full", "infty0"):
            raise UsageError("x0p2 supports --modulus full or infty0")
        m = data.modulus_full if which == "full" else data.modulus_prime
        rep = {"model": "x0p2", "p": cfg.p, "modulus": which, "components": list(data.fibre.labels),
               "params": dict(zip(("k", "a", "b", "Mt"), data.recipe.params))}
        rep.update(_group_report(data.fibre, m))
        return rep
    # generic fibre from JSON
    _need(cfg.input, "--input")
    f = SpecialFibre.from_json(_read_json(cfg.input))
    m = ModulusIncidence.from_json(_read_json(cfg.modulus_input), f.size) if cfg.modulus_input else None
    rep = {"model": "fibre", "components": list(f.labels)}
    rep.update(_group_report(f, m))
    return rep


def cmd_char_group(cfg: RunConfig) -> dict:
    _need(cfg.p, "--p")
    M = cfg.M or 1
    if M == 1:
        g = x0p_graph(cfg.p)
        H = h1(g)
        basis = x0p_gamma_basis(cfg.p)
        js = [repr(j) for j in supersingular_js(cfg.p).js]
    else:
        if cfg.ell is not None:
            raise UsageError("--hecke is only available for M = 1")
        g = x0pM_fibre(cfg.p, M, counts(cfg.p, M)).graph
        H = h1(g)
        basis = H.basis
        js = None
    cycles = [{e: c for e, c in zip(H.edges, col) if c} for col in basis.columns()]
    rep: dict[str, Any] = {"p": cfg.p, "M": M, "rank": H.rank, "basis": cycles}
    if js is not None:
        rep["supersingular_j"] = js
    if cfg.ell is not None:
        T = hecke_on_char_X0p(cfg.p, cfg.ell)
        rep["hecke"] = {"ell": cfg.ell, "matrix": T.to_lists()}
    return rep


def cmd_hecke_cusps(cfg: RunConfig) -> dict:
    _need(cfg.N, "--N")
    if cfg.N < 1:
        raise UsageError("N must be positive")
    cs = all_cusps(cfg.N)
    rep: dict[str, Any] = {
        "N": cfg.N,
        "cusps": [{"d": z.d, "c": z.c, "m": z.m, "label": z.label()} for z in cs],
        "orbits": [[z.label() for z in o] for o in cusps(cfg.N)],
    }
    if cfg.ell is not None:
        if not is_prime(cfg.ell):
            raise UsageError(f"ell = {cfg.ell} is not prime")
        T = hecke_matrix(cfg.N, cfg.ell)
        D = CuspidalDivisor.of(cfg.N, cfg.N) - CuspidalDivisor.of(cfg.N, 1)
        rep["hecke"] = {"ell": cfg.ell, "matrix": T.to_lists(), "image_of_0_minus_inf": _apply(T, D).to_json()}
    return rep


def _apply(T: IntMatrix, D: CuspidalDivisor) -> CuspidalDivisor:
    cs = all_cusps(D.N)
    return CuspidalDivisor(D.N, zip(cs, T @ D.vector()))


def cmd_brandt(cfg: RunConfig) -> dict:
    _need(cfg.p, "--p")
    _need(cfg.ell, "--ell")
    if cfg.ell != cfg.p and cfg.ell not in SUPPORTED:
        raise UsageError(f"unsupported ell {cfg.ell}; use one of {SUPPORTED} or p")
    B = brandt(cfg.p, cfg.ell)
    return {"p": cfg.p, "ell": cfg.ell, "j": [repr(j) for j in B.js], "w": list(B.weights),
            "matrix": B.matrix.to_lists()}


def _sweep_one(job: tuple[int, int]) -> dict:
    p, M = job
    c = counts(p, M)
    data = x0pM_fibre(p, M, c)
    jm = component_group_Jm(data.fibre, data.modulus)
    group, image = closed_form_X0pM(p, M, c)
    phiJ = closed_form_phiJ(p, M, c)
    free_row = jm.torus_images.row(jm.group.ngens - 1)
    ok = jm.group == group and jm.phi_J() == phiJ and abs(free_row[0]) == image
    return {"p": p, "M": M, "counts": list(c), "phi_Jm": str(jm.group), "image": image,
            "phi_J": str(jm.phi_J()), "ok": ok}


def cmd_sweep(cfg: RunConfig) -> dict:
    jobs = [(p, M) for M in cfg.Ms for p in range(5, cfg.p_max + 1) if is_prime(p) and gcd(p, M) == 1]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as ex:
            rows = list(ex.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    return {"rows": rows, "all_ok": all(r["ok"] for r in rows)}


def cmd_selftest(cfg: RunConfig) -> dict:
    checks = {}
    for p in (5, 7, 11, 13, 37):
        jm = component_group_Jm(*x0pM_fibre(p, 1, counts(p, 1))[:2])
        checks[f"X0({p}) Phi(J)"] = jm.phi_J().order == Fraction(p - 1, 12).numerator
    for p in (5, 13):
        f = x0p2_fibre(p)
        d = smith_normal_form(component_group_Jm(f.fibre, f.modulus_full).torus_images).diagonal()
        checks[f"X0({p}^2) SNF"] = d == (1, (p * p - 1) // 24)
    checks["B(11, 2) row sums"] = all(sum(r) == 3 for r in brandt(11, 2).matrix.to_lists())
    checks["tT_p = tB(p), p = 23"] = hecke_on_char_X0p(23, 23) == brandt(23, 23).matrix.T
    return {"checks": checks, "all_ok": all(checks.values())}


# --- plumbing ---------------------------------------------------------------

def _need(value, flag: str) -> None:
    if value is None:
        raise UsageError(f"{flag} is required")


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _table(rep: Any, indent: str = "") -> list[str]:
    lines = []
    for key, val in rep.items():
        if isinstance(val, dict):
            lines.append(f"{indent}{key}:")
            lines.extend(_table(val, indent + "  "))
        elif key in ("matrix", "torus_images") and isinstance(val, list):
            lines.append(f"{indent}{key}:")
            lines.extend(indent + line for line in _matrix_table(IntMatrix.from_rows(val, len(val[0]) if val else 0)))
        elif key == "rows":
            for row in val:
                lines.append(indent + "  ".join(f"{k}={v}" for k, v in row.items()))
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{indent}{key}:")
            for item in val:
                lines.append(indent + "  " + ", ".join(f"{k}={v}" for k, v in item.items()))
        else:
            lines.append(f"{indent}{key}: {val}")
    return lines


COMMANDS: dict[str, Callable[[RunConfig], dict]] = {
    "x0pM": cmd_component_group,
    "x0p2": cmd_component_group,
    "fibre": cmd_component_group,
    "char": cmd_char_group,
    "cusps": cmd_hecke_cusps,
    "brandt": cmd_brandt,
    "sweep": cmd_sweep,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="table")
    common.add_argument("--output", help="write the report here instead of stdout")

    ap = argparse.ArgumentParser(prog="neron", description="Component groups of Neron models of generalized Jacobians.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("x0pM", parents=[common], help="X_0(pM) at p with modulus (inf)+(0)")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--M", type=int, default=1)
    s.add_argument("--modulus", default="infty0", choices=("infty0",))

    s = sub.add_parser("x0p2", parents=[common], help="X_0(p^2) at p")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--modulus", default="full", choices=("full", "infty0"))

    s = sub.add_parser("fibre", parents=[common], help="a special fibre given as JSON")
    s.add_argument("--input", required=True)
    s.add_argument("--modulus-input", dest="modulus_input")

    s = sub.add_parser("char", parents=[common], help="character group of J_m for X_0(pM)")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--M", type=int, default=1)
    s.add_argument("--hecke", type=int)

    s = sub.add_parser("cusps", parents=[common], help="cusps of X_0(N) and tT_l on them")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--hecke", type=int)

    s = sub.add_parser("brandt", parents=[common], help="Brandt matrix B(l) at p")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--ell", type=int, required=True)

    s = sub.add_parser("sweep", parents=[common], help="closed forms for X_0(pM) over many p")
    s.add_argument("--p-max", dest="p_max", type=int, default=97)
    s.add_argument("--M", dest="Ms", type=int, nargs="+", default=[1])
    s.add_argument("--jobs", type=int, default=1)

    sub.add_parser("selftest", parents=[common], help="quick consistency checks")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(ns)
    try:
        rep = COMMANDS[cfg.command](cfg)
    except FibreError as exc:
        print("invalid fibre:", file=sys.stderr)
        for line in exc.report:
            print(f"  {line}", file=sys.stderr)
        return 2
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(rep, indent=2, sort_keys=True) if cfg.format == "json" else "\n".join(_table(rep))
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    failed = rep.get("all_ok") is False
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
