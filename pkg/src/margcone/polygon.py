"""Convex polygons by incremental half-plane clipping."""
from __future__ import annotations

import numpy as np

BOX = 1e6


def box(size: float = BOX) -> np.ndarray:
    return np.array([[-size, -size], [size, -size], [size, size], [-size, size]], dtype=float)


def clip(poly: np.ndarray, a: np.ndarray, c: float, tol: float = 1e-12) -> np.ndarray:
    """Intersect a CCW convex polygon with the half-plane a.p >= c."""
    if len(poly) == 0:
        return poly
    vals = poly @ a - c
    scale = tol * max(1.0, float(np.abs(poly).max()) * float(np.abs(a).max()))
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        vp, vq = vals[i], vals[(i + 1) % n]
        if vp >= -scale:
            out.append(p)
        if (vp >= -scale) != (vq >= -scale) and abs(vp - vq) > 0:
            s = vp / (vp - vq)
            out.append(p + s * (q - p))
    if len(out) < 3:
        return np.zeros((0, 2))
    return _dedupe(np.array(out))


def _dedupe(poly: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    keep = []
    n = len(poly)
    for i in range(n):
        if np.linalg.norm(poly[i] - poly[(i + 1) % n]) > tol * max(1.0, np.abs(poly).max()):
            keep.append(poly[i])
    return np.array(keep) if len(keep) >= 3 else np.zeros((0, 2))


def area(poly: np.ndarray) -> float:
    """Shoelace area (positive for CCW vertex order)."""
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def intersect_halfplanes(normals, offsets, size: float = BOX) -> np.ndarray:
    """Polygon {p : normals[i].p >= offsets[i]} clipped to the square of half-width size."""
    poly = box(size)
    for a, c in zip(np.asarray(normals, dtype=float), np.asarray(offsets, dtype=float)):
        poly = clip(poly, a, c)
        if len(poly) == 0:
            break
    return poly
