"""Command-line front end.

Exit codes: 0 success or certificate found, 1 clean negative answer,
2 input rejected on mathematical grounds, 3 parse error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import cone, currents, errors, margulis
from .fileio import (FunctionalCache, ParseError, atomic_write, cocycle_from_json,
                     current_from_json, group_from_json, read_json)
from .freegrp import as_word, enumerate_classes
from .lie_core import translation_length
from .schottky import PRESETS, SchottkyGroup
from .symrep import SymPowerRep

EXIT_OK, EXIT_NEGATIVE, EXIT_MATH, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3, 4
EVEN_R_FLAG = "even r: no proper actions in this dimension"
RADIANT_NOTE = "radiant (α ≡ 0)"
COMMANDS = ("group", "invariants", "cone", "report", "certify", "quad", "psi", "form")


@dataclass
class RunConfig:
    command: str
    group_path: Optional[str] = None
    preset: Optional[str] = None
    params: Optional[dict] = None
    cocycle_path: Optional[str] = None
    current_path: Optional[str] = None
    r: Optional[int] = None
    L: int = 4
    zero_tol: float = margulis.ZERO_TOL
    output_path: Optional[str] = None
    section_path: Optional[str] = None
    fold_inverses: bool = False
    seed: int = 0
    steps: int = 10_000
    word: Optional[str] = None
    cache_dir: Optional[str] = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ParseError(f"unknown command {self.command!r}")
        if self.r is not None and self.r < 1:
            raise ParseError("--r must be at least 1")
        if not 1 <= self.L <= cone.MAX_L:
            raise ParseError(f"--L must lie in [1, {cone.MAX_L}]")
        if (self.group_path is None) == (self.preset is None):
            raise ParseError("give exactly one of --group PATH or --preset NAME")
        if self.group_path is not None and not os.path.exists(self.group_path):
            raise ParseError(f"no such file: {self.group_path}")
        for p in (self.cocycle_path, self.current_path):
            if p is not None and not os.path.exists(p):
                raise ParseError(f"no such file: {p}")
        if self.command in ("invariants", "certify", "quad", "psi") and self.cocycle_path is None:
            raise ParseError(f"{self.command} needs --cocycle PATH")
        if self.command == "psi" and self.current_path is None:
            raise ParseError("psi needs --current PATH")
        if self.command == "quad" and self.word is None:
            raise ParseError("quad needs --word W")
        if self.steps < 1:
            raise ParseError("--steps must be positive")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_PARSE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="margcone", description="Margulis invariants and properness cones "
                "for affine deformations of Schottky groups.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "group": "certify a Schottky group and print generator lengths",
        "invariants": "JSONL table of l, alpha and alpha/l per conjugacy class",
        "cone": "margin LPs for the graded cone, plus a cross-section when dim H^1 = 3",
        "report": "CSV table of (L, count, t_plus, t_minus, area) for L = 1..--L",
        "certify": "search for classes with opposite-sign invariants",
        "quad": "quadrature check of alpha as an integral over one period",
        "psi": "evaluate the diffused invariant on a finite current",
        "form": "export the invariant form and representation matrices",
    }
    for name in COMMANDS:
        s = sub.add_parser(name, help=helps[name])
        g = s.add_mutually_exclusive_group()
        g.add_argument("--group", dest="group_path", metavar="PATH")
        g.add_argument("--preset", choices=sorted(PRESETS))
        s.add_argument("--params", metavar="JSON", help="preset parameters as a JSON object")
        s.add_argument("--cocycle", dest="cocycle_path", metavar="PATH")
        s.add_argument("--current", dest="current_path", metavar="PATH")
        s.add_argument("--r", type=int)
        s.add_argument("--L", type=int, default=4)
        s.add_argument("--tol", dest="zero_tol", type=float, default=margulis.ZERO_TOL,
                       help="threshold below which |alpha| counts as zero")
        s.add_argument("--fold-inverses", action="store_true")
        s.add_argument("--out", dest="output_path", metavar="PATH")
        s.add_argument("--section", dest="section_path", metavar="PATH",
                       help="cone: also write the cross-section polygon here")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--steps", type=int, default=10_000)
        s.add_argument("--word")
        s.add_argument("--cache", dest="cache_dir", metavar="DIR",
                       default=os.environ.get("MARGCONE_CACHE"))
    return p


def config_from_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    params = None
    if ns.params is not None:
        try:
            params = json.loads(ns.params)
        except json.JSONDecodeError as exc:
            raise ParseError(f"--params is not valid JSON ({exc})") from exc
        if not isinstance(params, dict):
            raise ParseError("--params must be a JSON object")
    cfg = RunConfig(ns.command, ns.group_path, ns.preset, params, ns.cocycle_path,
                    ns.current_path, ns.r, ns.L, ns.zero_tol, ns.output_path,
                    ns.section_path, ns.fold_inverses, ns.seed, ns.steps, ns.word, ns.cache_dir)
    cfg.validate()
    return cfg


def load_group(cfg: RunConfig) -> tuple:
    """(group, r) with r from --r, else the group file, else 1."""
    if cfg.preset is not None:
        data = {"preset": cfg.preset, "params": cfg.params or {}}
    else:
        data = read_json(cfg.group_path)
    try:
        group = group_from_json(data)
    except TypeError as exc:
        raise ParseError(f"bad preset parameters: {exc}") from exc
    r = cfg.r if cfg.r is not None else data.get("r", 1) if isinstance(data, dict) else 1
    if not isinstance(r, int) or r < 1:
        raise ParseError("r must be a positive integer")
    return group, r


def _flags(r: int) -> list:
    return [EVEN_R_FLAG] if r % 2 == 0 else []


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path:
        atomic_write(cfg.output_path, text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _functionals(cfg: RunConfig, group: SchottkyGroup, r: int, classes) -> tuple:
    if cfg.cache_dir:
        return FunctionalCache(cfg.cache_dir, group, r).functionals(classes)
    return margulis.alpha_functionals(group, r, classes)


def cmd_group(cfg: RunConfig) -> int:
    group, r = load_group(cfg)
    out = {
        "status": "certified",
        "margin": group.margin,
        "rank": group.rank,
        "r": r,
        "generator_lengths": [translation_length(g) for g in group.generators],
        "generators": [g.to_list() for g in group.generators],
        "intervals": [a.as_pair() for a in group.intervals],
        "flags": _flags(r),
    }
    if group.name != "custom":
        out["preset"] = group.name
        out["params"] = dict(group.params)
    _emit(cfg, _dumps(out))
    return EXIT_OK


def _invariant_rows(cfg, group, r, u) -> list:
    classes = enumerate_classes(group.rank, cfg.L, cfg.fold_inverses)
    func, ell = _functionals(cfg, group, r, classes)
    a = np.einsum("nkd,kd->n", func, u.values)
    return [{"word": str(c), "length": len(c), "ell": float(l_), "alpha": float(x),
             "alpha_over_ell": float(x / l_)} for c, l_, x in zip(classes, ell, a)]


def cmd_invariants(cfg: RunConfig) -> int:
    group, r = load_group(cfg)
    u = cocycle_from_json(read_json(cfg.cocycle_path), group, r)
    rows = _invariant_rows(cfg, group, r, u)
    _emit(cfg, "".join(json.dumps(rec) + "\n" for rec in rows))
    for f in _flags(r):
        print(f"note: {f}", file=sys.stderr)
    return EXIT_OK


def cmd_cone(cfg: RunConfig) -> int:
    group, r = load_group(cfg)
    H = cone.build_halfspaces(group, r, cfg.L, cfg.fold_inverses)
    plus, minus = cone.margin_lp(H, 1), cone.margin_lp(H, -1)
    out = {
        "L": cfg.L, "r": r, "entries": len(H), "raw_count": H.raw_count,
        "status": cone.combined_status(plus, minus),
        "positive": plus.to_json(), "negative": minus.to_json(),
        "note": "finite L gives necessary conditions only: positive margins are "
                "consistent with proper, never a proof of it",
        "flags": _flags(r),
    }
    if H.dim == 3:
        cs = cone.cross_section(H)
        out["cross_section"] = cs.to_json()
        if cfg.section_path:
            atomic_write(cfg.section_path, _dumps(cs.to_json()))
    _emit(cfg, _dumps(out))
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    group, r = load_group(cfg)
    rows = cone.convergence_report(group, r, cfg.L, cfg.fold_inverses)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["L", "count", "t_plus", "t_minus", "area"])
    for row in rows:
        w.writerow([row.L, row.count, repr(row.t_plus), repr(row.t_minus),
                    "" if row.area is None else repr(row.area)])
    _emit(cfg, buf.getvalue())
    for f in _flags(r):
        print(f"note: {f}", file=sys.stderr)
    return EXIT_OK


def cmd_certify(cfg: RunConfig) -> int:
    group, r = load_group(cfg)
    u = cocycle_from_json(read_json(cfg.cocycle_path), group, r)
    cert = currents.opposite_sign_certificate(u, cfg.L, cfg.zero_tol)
    out = {"L": cfg.L, "r": r, "flags": _flags(r)}
    if cert is None:
        out["certificate"] = None
        classes = enumerate_classes(group.rank, cfg.L)
        a, _ = margulis.alphas(u, classes)
        if np.all(np.abs(a) <= cfg.zero_tol):
            out["note"] = RADIANT_NOTE
        _emit(cfg, _dumps(out))
        return EXIT_NEGATIVE
    mu = currents.zero_current(u, cert.negative, cert.positive)
    out["certificate"] = cert.to_json()
    out["zero_current"] = mu.to_json()
    out["psi_zero_current"] = currents.psi(u, mu)
    _emit(cfg, _dumps(out))
    return EXIT_OK


def cmd_quad(cfg: RunConfig) -> int:
    group, r = load_group(cfg)
    u = cocycle_from_json(read_json(cfg.cocycle_path), group, r)
    try:
        w = as_word(cfg.word)
    except errors.BadIndex as exc:
        raise ParseError(str(exc)) from exc
    rng = np.random.default_rng(cfg.seed)
    numeric, exact, err = currents.quadrature_check(u, w, cfg.steps, rng=rng)
    _emit(cfg, _dumps({"word": str(w), "steps": cfg.steps, "numeric": numeric,
                       "exact": exact, "abs_err": err}))
    return EXIT_OK


def cmd_psi(cfg: RunConfig) -> int:
    group, r = load_group(cfg)
    u = cocycle_from_json(read_json(cfg.cocycle_path), group, r)
    mu = current_from_json(read_json(cfg.current_path))
    _emit(cfg, _dumps({"psi": currents.psi(u, mu), "current": mu.to_json()}))
    return EXIT_OK


def cmd_form(cfg: RunConfig) -> int:
    group, r = load_group(cfg)
    _emit(cfg, _dumps(SymPowerRep(r).to_json(group.generators)))
    return EXIT_OK


HANDLERS = {"group": cmd_group, "invariants": cmd_invariants, "cone": cmd_cone,
            "report": cmd_report, "certify": cmd_certify, "quad": cmd_quad,
            "psi": cmd_psi, "form": cmd_form}


def main(argv=None) -> int:
    try:
        try:
            cfg = config_from_args(argv)
        except SystemExit as exc:  # argparse usage errors and --help
            return exc.code if isinstance(exc.code, int) else EXIT_PARSE
        return HANDLERS[cfg.command](cfg)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (errors.LPNumericalFailure, errors.DegenerateSolve) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (errors.MargconeError, ValueError) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
