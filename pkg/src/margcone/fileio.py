"""JSON file formats, atomic writes and the per-(group, r) functional cache."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .currents import FiniteCurrent
from .errors import BadIndex, DimMismatch
from .freegrp import ConjClass, conj_class
from .margulis import Cocycle, alpha_functionals
from .schottky import SchottkyGroup, from_generators, preset


class ParseError(Exception):
    """Malformed input file or flag value."""


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ParseError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def group_from_json(data: dict) -> SchottkyGroup:
    if not isinstance(data, dict):
        raise ParseError("group file must hold a JSON object")
    if "preset" in data:
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise ParseError("preset params must be a JSON object")
        return preset(str(data["preset"]), params)
    gens = data.get("generators")
    if not isinstance(gens, list) or not all(isinstance(g, list) and len(g) == 4 for g in gens):
        raise ParseError('group file needs "generators": [[a, b, c, d], ...] or "preset"')
    try:
        entries = [tuple(float(x) for x in g) for g in gens]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"generator entries must be numbers ({exc})") from exc
    return from_generators(entries)


def cocycle_from_json(data: dict, group: SchottkyGroup, r: int) -> Cocycle:
    u = data.get("u") if isinstance(data, dict) else None
    if not isinstance(u, list):
        raise ParseError('cocycle file needs "u": [[...], ...]')
    try:
        arr = np.array(u, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"cocycle entries must be numbers ({exc})") from exc
    if arr.shape != (group.rank, 2 * r + 1):
        raise DimMismatch(
            f"cocycle has shape {arr.shape}; r = {r} and rank {group.rank} need "
            f"({group.rank}, {2 * r + 1})")
    return Cocycle(arr, group, r)


def current_from_json(data: dict) -> FiniteCurrent:
    try:
        return FiniteCurrent.from_json(data)
    except (KeyError, TypeError) as exc:
        raise ParseError('current file needs "atoms": [{"word": ..., "weight": ...}]') from exc


def group_hash(group: SchottkyGroup, r: int) -> str:
    payload = json.dumps({"generators": [list(g.entries) for g in group.generators], "r": r},
                         sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


class FunctionalCache:
    """JSONL cache of (class, l, functional) records for one (group, r).

    The file name carries the content hash, and each record repeats it, so a
    record for another group or r is never read back.  Safe to delete.
    """

    def __init__(self, root, group: SchottkyGroup, r: int):
        self.group, self.r = group, r
        self.key = group_hash(group, r)
        self.path = Path(root) / f"functionals-{self.key}.jsonl"

    def _load(self) -> dict:
        out = {}
        if not self.path.exists():
            return out
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    continue
                if rec.get("hash") != self.key or rec.get("r") != self.r:
                    continue
                out[rec["class"]] = (rec["ell"], rec["functional"])
        return out

    def functionals(self, classes) -> tuple:
        """(functionals, lengths) for the classes, computing and storing misses."""
        known = self._load()
        missing = [c for c in classes if str(c) not in known]
        if missing:
            func, ell = alpha_functionals(self.group, self.r, missing)
            for c, f, l_ in zip(missing, func, ell):
                known[str(c)] = (float(l_), f.tolist())
            lines = [json.dumps({"hash": self.key, "r": self.r, "class": k, "ell": v[0],
                                 "functional": v[1]}) for k, v in sorted(known.items())]
            atomic_write(self.path, "\n".join(lines) + "\n")
        func = np.array([known[str(c)][1] for c in classes], dtype=float)
        ell = np.array([known[str(c)][0] for c in classes], dtype=float)
        return func, ell


def parse_class(s: str) -> ConjClass:
    try:
        return conj_class(s)
    except BadIndex as exc:
        raise ParseError(str(exc)) from exc
