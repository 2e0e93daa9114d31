"""Goh-variety polynomials F^{h,k} and plane-curve tracing for rank 2.

For a normal-form frame whose coefficients depend only on x_1..x_r, the
second-order (Goh) annihilation conditions along a trajectory reduce to
polynomial constraints on the base projection: F^{h,k}(x) built from the
lambda-weighted curls of the coefficient matrix.  The rank-2 variety
{F^{1,2} = 0} is traced by marching squares with bisection-refined
vertices and a singular-candidate scan.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import PreconditionError
from .metabelian import coefficient_dependence
from .normalform import verify_normal_form
from .polyfield import Frame, Poly

ZERO = Fraction(0)


def _as_exact(c):
    if isinstance(c, (Fraction, int)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    return c  # float stays float; polynomials then carry float coefficients


@dataclass
class GohSystem:
    """Antisymmetric family F[h][k] on R^r, stored upper-triangular."""

    r: int
    lam: list
    polys: dict  # (h, k) with 1 <= h < k <= r -> Poly in r variables

    def poly(self, h: int, k: int) -> Poly:
        if not (1 <= h <= self.r and 1 <= k <= self.r):
            raise ValueError("field indices out of range")
        if h == k:
            return Poly.zero(self.r)
        if h < k:
            return self.polys[(h, k)]
        return -self.polys[(k, h)]

    def to_json(self) -> dict:
        def cstr(c):
            if isinstance(c, Fraction):
                return f"{c.numerator}/{c.denominator}"
            return c

        return {
            "schema": "goh-atlas/1",
            "type": "goh_system",
            "r": self.r,
            "lambda": [cstr(c) for c in self.lam],
            "polys": {
                f"{h},{k}": p.to_json() for (h, k), p in sorted(self.polys.items())
            },
        }


def goh_polynomials(frame: Frame, lam) -> GohSystem:
    """F^{h,k}(x) = sum_{j>r} lambda_j (dA_{k,j}/dx_h - dA_{h,j}/dx_k).

    Requires the metabelian normal-form shape: triangular frame whose
    coefficients live on x_1..x_r (otherwise the reduction to base
    polynomials is not valid) and a nonzero covector.
    """
    n, r = frame.n, frame.r
    lam = [_as_exact(c) for c in lam]
    if len(lam) != n:
        raise ValueError(f"covector needs {n} entries")
    if not any(lam):
        raise ValueError("covector must be nonzero")
    if not verify_normal_form(frame)["ok"]:
        raise PreconditionError("frame is not in normal form")
    if not coefficient_dependence(frame):
        raise PreconditionError(
            "normal-form coefficients depend on vertical coordinates; "
            "the variety reduction needs the metabelian shape")

    polys = {}
    for h in range(1, r + 1):
        for k in range(h + 1, r + 1):
            acc = Poly.zero(n)
            for j in range(r, n):
                if not lam[j]:
                    continue
                curl = (frame.fields[k - 1].comps[j].diff(h - 1)
                        - frame.fields[h - 1].comps[j].diff(k - 1))
                if curl:
                    acc = acc + curl * lam[j]
            polys[(h, k)] = acc.restrict(r)
    return GohSystem(r, lam, polys)


def variety_membership(sys: GohSystem, curve) -> float:
    """sup over curve samples and pairs (h,k) of |F^{h,k}(point)|."""
    points = getattr(curve, "points", curve)
    worst = 0.0
    for pt in points:
        if len(pt) != sys.r:
            raise ValueError("curve points must live in R^r")
        for p in sys.polys.values():
            v = abs(float(p.eval_float([float(c) for c in pt])))
            if v > worst:
                worst = v
    return worst


# ---------------------------------------------------------------------------
# plane tracing (r = 2)

@dataclass
class VarietyTrace:
    window: tuple  # (x_min, x_max, y_min, y_max)
    resolution: int
    polylines: list = field(default_factory=list)
    singular_candidates: list = field(default_factory=list)
    whole_plane: bool = False
    tolerance: float = 0.0
    f_scale: float = 0.0

    def to_json(self) -> dict:
        return {
            "schema": "goh-atlas/1",
            "type": "variety_trace",
            "window": list(self.window),
            "resolution": self.resolution,
            "whole_plane": self.whole_plane,
            "tolerance": self.tolerance,
            "polylines": [[[p[0], p[1]] for p in line]
                          for line in self.polylines],
            "singular_candidates": [[p[0], p[1]]
                                    for p in self.singular_candidates],
        }

    def to_csv(self) -> str:
        lines = ["x1,x2,branch_id"]
        for bid, chain in enumerate(self.polylines):
            for x, y in chain:
                lines.append(f"{format(x, '.17g')},{format(y, '.17g')},{bid}")
        return "\n".join(lines) + "\n"


def _poly_grid_eval(p: Poly, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Values on the grid (len(ys), len(xs)), rows indexed by y."""
    gx, gy = np.meshgrid(xs, ys)
    out = np.zeros_like(gx)
    for e, c in p.terms.items():
        out += float(c) * gx ** e[0] * gy ** e[1]
    return out


def _bisect_edge(f, pa, pb, va, vb, tol: float):
    """Zero of f on the segment [pa, pb] given a sign change, |f| <= tol."""
    if abs(va) <= tol:
        return pa
    if abs(vb) <= tol:
        return pb
    ax, ay = pa
    bx, by = pb
    for _ in range(200):
        mx, my = 0.5 * (ax + bx), 0.5 * (ay + by)
        vm = f(mx, my)
        if abs(vm) <= tol:
            return (mx, my)
        if (vm > 0) == (va > 0):
            ax, ay, va = mx, my, vm
        else:
            bx, by = mx, my
    return (0.5 * (ax + bx), 0.5 * (ay + by))


_SEGMENT_TABLE = {
    1: [("left", "bottom")],
    2: [("bottom", "right")],
    3: [("left", "right")],
    4: [("top", "right")],
    6: [("bottom", "top")],
    7: [("left", "top")],
    8: [("left", "top")],
    9: [("bottom", "top")],
    11: [("top", "right")],
    12: [("left", "right")],
    13: [("bottom", "right")],
    14: [("left", "bottom")],
}
# cases 5 and 10 are saddles, resolved by the cell-center sign


def trace_variety(sys: GohSystem, window=(-2.0, 2.0, -2.0, 2.0),
                  resolution: int = 512) -> VarietyTrace:
    """Marching-squares trace of {F^{1,2} = 0} with refined vertices.

    Every emitted vertex is driven by bisection to |F| <= 1e-9 (1 + max|F|
    over the grid).  Zero corner values count as positive so curves through
    grid nodes are kept.  F identically zero reports the whole plane.
    """
    if sys.r != 2:
        raise ValueError("plane tracing needs a rank-2 system")
    F = sys.poly(1, 2)
    x0, x1, y0, y1 = (float(v) for v in window)
    if not (x0 < x1 and y0 < y1):
        raise ValueError("window must satisfy x_min < x_max, y_min < y_max")
    res = int(resolution)
    if res < 2:
        raise ValueError("resolution must be at least 2")

    trace = VarietyTrace(window=(x0, x1, y0, y1), resolution=res)
    if F.is_zero():
        trace.whole_plane = True
        return trace

    xs = np.linspace(x0, x1, res + 1)
    ys = np.linspace(y0, y1, res + 1)
    vals = _poly_grid_eval(F, xs, ys)
    scale = float(np.max(np.abs(vals)))
    tol = 1e-9 * (1.0 + scale)
    trace.tolerance = tol
    trace.f_scale = scale

    feval = F.eval_float

    def f(px, py):
        return feval((px, py))

    # sign matrix with zeros counted positive
    pos = vals >= 0.0

    # crossing vertices keyed by grid edge
    verts: dict[tuple, tuple] = {}

    def edge_vertex(kind, i, j):
        # horizontal edge: (i, j) -> (i+1, j); vertical: (i, j) -> (i, j+1)
        key = (kind, i, j)
        got = verts.get(key)
        if got is not None:
            return got
        if kind == "h":
            pa, pb = (xs[i], ys[j]), (xs[i + 1], ys[j])
            va, vb = vals[j, i], vals[j, i + 1]
        else:
            pa, pb = (xs[i], ys[j]), (xs[i], ys[j + 1])
            va, vb = vals[j, i], vals[j + 1, i]
        v = _bisect_edge(f, pa, pb, va, vb, tol)
        verts[key] = v
        return v

    edges_of_cell = {
        "bottom": lambda i, j: ("h", i, j),
        "top": lambda i, j: ("h", i, j + 1),
        "left": lambda i, j: ("v", i, j),
        "right": lambda i, j: ("v", i + 1, j),
    }

    # adjacency between edge keys, built cell by cell
    links: dict[tuple, list] = {}

    def link(ka, kb):
        links.setdefault(ka, []).append(kb)
        links.setdefault(kb, []).append(ka)

    for j in range(res):
        for i in range(res):
            code = (
                (1 if pos[j, i] else 0)
                | (2 if pos[j, i + 1] else 0)
                | (4 if pos[j + 1, i + 1] else 0)
                | (8 if pos[j + 1, i] else 0)
            )
            if code in (0, 15):
                continue
            if code in (5, 10):
                center = f(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]))
                center_pos = center >= 0.0
                if code == 5:  # corners BL,TR negative? no: 5 = BL+TR positive
                    pairs = ([("left", "top"), ("bottom", "right")]
                             if center_pos
                             else [("left", "bottom"), ("top", "right")])
                else:  # code 10: BR+TL positive
                    pairs = ([("left", "bottom"), ("top", "right")]
                             if center_pos
                             else [("left", "top"), ("bottom", "right")])
            else:
                pairs = _SEGMENT_TABLE[code]
            for ea, eb in pairs:
                ka = edges_of_cell[ea](i, j)
                kb = edges_of_cell[eb](i, j)
                edge_vertex(*ka)
                edge_vertex(*kb)
                link(ka, kb)

    # chain the segment graph into polylines (open paths first, then loops)
    used = set()

    def walk(start):
        chain = [start]
        used.add(start)
        cur = start
        prev = None
        while True:
            nxt = None
            for cand in links[cur]:
                if cand != prev and cand not in used:
                    nxt = cand
                    break
            if nxt is None:
                # close a loop if the start is adjacent
                if len(chain) > 2 and start in links[cur]:
                    chain.append(start)
                break
            chain.append(nxt)
            used.add(nxt)
            prev, cur = cur, nxt
        return chain

    endpoints = [k for k, adj in links.items() if len(adj) == 1]
    chains = []
    for k in endpoints:
        if k not in used:
            chains.append(walk(k))
    for k in links:
        if k not in used:
            chains.append(walk(k))

    trace.polylines = [[verts[k] for k in chain] for chain in chains]
    trace.singular_candidates = _singular_candidates(F, xs, ys, vals, tol)
    return trace


def _singular_candidates(F: Poly, xs, ys, vals, tol) -> list:
    fx, fy = F.diff(0), F.diff(1)
    gx = _poly_grid_eval(fx, xs, ys)
    gy = _poly_grid_eval(fy, xs, ys)
    grad = np.hypot(gx, gy)
    gscale = float(np.max(grad)) if grad.size else 0.0
    cell = max(xs[1] - xs[0], ys[1] - ys[0])

    # grid pre-candidates: both F and its gradient small at the node scale
    mask = (np.abs(vals) <= (1.0 + float(np.max(np.abs(vals)))) * cell) \
        & (grad <= (1.0 + gscale) * cell * 4.0)
    cand_idx = np.argwhere(mask)
    if cand_idx.size == 0:
        return []

    fxx, fxy = fx.diff(0), fx.diff(1)
    fyx, fyy = fy.diff(0), fy.diff(1)

    def newton(p, q, jac_rows, x, y):
        # damped Newton for the 2x2 system (p, q)
        for _ in range(60):
            r0, r1 = p.eval_float((x, y)), q.eval_float((x, y))
            res = abs(r0) + abs(r1)
            if res == 0.0:
                return x, y
            (a, b), (c, d) = jac_rows
            j00, j01 = a.eval_float((x, y)), b.eval_float((x, y))
            j10, j11 = c.eval_float((x, y)), d.eval_float((x, y))
            det = j00 * j11 - j01 * j10
            if det == 0.0 or not np.isfinite(det):
                return None
            dx = (r0 * j11 - r1 * j01) / det
            dy = (j00 * r1 - j10 * r0) / det
            step = 1.0
            while step > 1e-6:
                nx, ny = x - step * dx, y - step * dy
                nres = abs(p.eval_float((nx, ny))) + abs(q.eval_float((nx, ny)))
                if nres < res:
                    x, y = nx, ny
                    break
                step *= 0.5
            else:
                return x, y
        return x, y

    systems = [
        (F, fx, ((fx, fy), (fxx, fxy))),
        (F, fy, ((fx, fy), (fyx, fyy))),
        (fx, fy, ((fxx, fxy), (fyx, fyy))),
    ]

    gtol = 1e-7 * (1.0 + gscale)
    found: list = []
    for j, i in cand_idx:
        x0, y0 = float(xs[i]), float(ys[j])
        best = None
        for p, q, jac in systems:
            got = newton(p, q, jac, x0, y0)
            if got is None:
                continue
            x, y = got
            if abs(F.eval_float((x, y))) <= tol \
                    and np.hypot(fx.eval_float((x, y)),
                                 fy.eval_float((x, y))) <= gtol:
                score = np.hypot(fx.eval_float((x, y)), fy.eval_float((x, y)))
                if best is None or score < best[0]:
                    best = (score, x, y)
        if best is None:
            continue
        _, x, y = best
        if all(np.hypot(x - u, y - v) > cell for u, v in found):
            found.append((x, y))
    return found


def hausdorff_distance(points_a, points_b) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    a = np.asarray(list(points_a), dtype=float)
    b = np.asarray(list(points_b), dtype=float)
    if a.size == 0 or b.size == 0:
        return float("inf") if a.size != b.size else 0.0

    def directed(p, q):
        worst = 0.0
        for lo in range(0, len(p), 512):
            block = p[lo:lo + 512]
            d = np.sqrt(((block[:, None, :] - q[None, :, :]) ** 2).sum(axis=2))
            worst = max(worst, float(d.min(axis=1).max()))
        return worst

    return max(directed(a, b), directed(b, a))


__all__ = [
    "GohSystem",
    "VarietyTrace",
    "goh_polynomials",
    "hausdorff_distance",
    "trace_variety",
    "variety_membership",
]
