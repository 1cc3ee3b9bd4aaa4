"""
Outer bound and achievable rate regions for the separated two-way relay
channel, plus the binary adder special case.

Regions are computed by deterministic grid search over input distributions
followed by Pareto pruning. By default the result is also closed under
time-sharing, i.e. ``RateRegion.points`` are the vertices of the upper concave
envelope of the Pareto staircase.

Naming: ``r12`` is the rate from node 1 to node 2, ``r21`` the reverse. The
uplink kernel is p(yR | x12, x21), ``dl1`` is p(y1 | xR) and ``dl2`` is
p(y2 | xR).
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .info import (
    JointPmf,
    Kernel,
    Pmf,
    adder_kernel,
    binary_entropy,
    bsc_kernel,
    conditional_entropy,
    conditional_mutual_information,
    entropy_bits,
    joint_from,
    joint_single,
    mutual_information,
)

TOL = 1e-12
SCHEMES = ("outer", "df", "hf", "shannon-inner", "pnc")
GRID_WARN_POINTS = 2_000_000


class RegionError(ValueError):
    pass


# ------------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class RatePoint:
    r12: float
    r21: float

    def __post_init__(self):
        for name in ("r12", "r21"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < -TOL:
                raise RegionError(f"{name} must be a nonnegative rate, got {v}")
            object.__setattr__(self, name, max(v, 0.0))

    def swapped(self) -> "RatePoint":
        return RatePoint(self.r21, self.r12)

    def scaled(self, factor: float) -> "RatePoint":
        return RatePoint(self.r12 * factor, self.r21 * factor)

    @property
    def total(self) -> float:
        return self.r12 + self.r21


@dataclass(frozen=True)
class BinaryAdderParams:
    eps_r: float
    eps_1: float
    eps_2: float

    def __post_init__(self):
        for name in ("eps_r", "eps_1", "eps_2"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 0.5:
                raise RegionError(f"{name} must lie in [0, 0.5], got {v}")
            object.__setattr__(self, name, v)

    def relabeled(self) -> "BinaryAdderParams":
        """Same channel with nodes 1 and 2 exchanged."""
        return BinaryAdderParams(self.eps_r, self.eps_2, self.eps_1)

    def kernels(self) -> tuple[Kernel, Kernel, Kernel]:
        """(uplink, dl1, dl2)."""
        return adder_kernel(self.eps_r), bsc_kernel(self.eps_1), bsc_kernel(self.eps_2)


@dataclass(frozen=True)
class DlRefinementRates:
    rr1: float
    rr2: float

    def __post_init__(self):
        if not self.rr1 >= self.rr2 - TOL or self.rr2 < -TOL:
            raise RegionError(f"need rr1 >= rr2 >= 0, got ({self.rr1}, {self.rr2})")


@dataclass(frozen=True)
class RegimePoint:
    regime: str
    alpha: float
    rates: RatePoint
    # True when nodes were relabeled (eps_2 > eps_1) to classify the regime;
    # ``rates`` are always reported in the caller's labeling.
    swapped: bool = False

    def __post_init__(self):
        if self.regime not in ("strong", "medium", "weak"):
            raise RegionError(f"unknown regime {self.regime!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise RegionError(f"alpha out of range: {self.alpha}")


def pareto_front(pts) -> np.ndarray:
    """Non-dominated rows of an (N, 2) array, sorted by r12 ascending."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return pts
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))  # r12 desc, then r21 desc
    out = []
    best21 = -np.inf
    for r12, r21 in pts[order]:
        if r21 > best21 + TOL:
            # a kept neighbour with (numerically) the same r12 is now dominated
            if out and out[-1][0] - r12 <= TOL:
                out.pop()
            out.append((r12, r21))
            best21 = r21
    return np.array(out[::-1])


def concave_envelope(front: np.ndarray) -> np.ndarray:
    """Vertices of the upper concave envelope of a Pareto staircase."""
    if len(front) <= 2:
        return front
    hull: list[np.ndarray] = []
    for p in front:
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0])
            if cross >= -TOL:
                hull.pop()
            else:
                break
        hull.append(p)
    return np.array(hull)


@dataclass(frozen=True)
class RateRegion:
    """
    Dominant boundary of a rate region.

    ``points`` are sorted by r12 ascending with r21 strictly decreasing. When
    ``time_shared`` is set the region is the downward closure of the convex
    hull of the points; otherwise it is the union of the rectangles below
    each point.
    """

    points: tuple[RatePoint, ...]
    scheme: str
    time_shared: bool = True
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise RegionError(f"unknown scheme {self.scheme!r}")
        if not self.points:
            raise RegionError("region has no points")
        pts = self.points
        for a, b in zip(pts, pts[1:]):
            if not (a.r12 < b.r12 and a.r21 > b.r21):
                raise RegionError("points must form a Pareto staircase")

    @classmethod
    def from_points(cls, pts, scheme: str, time_sharing: bool = True, params: Optional[dict] = None):
        front = pareto_front(pts)
        if len(front) == 0:
            raise RegionError("no candidate points")
        if time_sharing:
            front = concave_envelope(front)
        return cls(tuple(RatePoint(a, b) for a, b in front), scheme, time_sharing, dict(params or {}))

    def as_array(self) -> np.ndarray:
        return np.array([(p.r12, p.r21) for p in self.points])

    @property
    def max_r12(self) -> float:
        return self.points[-1].r12

    @property
    def max_r21(self) -> float:
        return self.points[0].r21

    @property
    def max_sum(self) -> float:
        return max(p.total for p in self.points)

    def r21_at(self, r12: float) -> float:
        """Largest r21 in the region at the given r12 (-inf outside)."""
        if r12 > self.max_r12 + TOL:
            return -math.inf
        arr = self.as_array()
        if self.time_shared:
            if r12 <= arr[0, 0]:
                return float(arr[0, 1])
            return float(np.interp(min(r12, self.max_r12), arr[:, 0], arr[:, 1]))
        ok = arr[:, 0] >= r12 - TOL
        return float(arr[ok, 1].max())

    def contains(self, p: RatePoint, tol: float = 1e-9) -> bool:
        if p.r12 > self.max_r12 + tol:
            return False
        return p.r21 <= self.r21_at(min(p.r12, self.max_r12)) + tol

    def symmetric_rate(self) -> float:
        """Largest r with (r, r) in the region."""
        if not self.time_shared:
            return max(min(p.r12, p.r21) for p in self.points)
        lo, hi = 0.0, min(self.max_r12, self.max_r21)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.r21_at(mid) >= mid:
                lo = mid
            else:
                hi = mid
        return lo

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r12", "r21", "scheme", "param_json"])
        meta = json.dumps(self.params, sort_keys=True)
        for p in self.points:
            w.writerow([repr(p.r12), repr(p.r21), self.scheme, meta])
        return buf.getvalue()


def read_region_csv(text: str) -> list[tuple[float, float, str, dict]]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [(float(r["r12"]), float(r["r21"]), r["scheme"], json.loads(r["param_json"])) for r in rows]


# ------------------------------------------------------------------------------
# distribution grids

def simplex_grid(size: int, steps: int) -> np.ndarray:
    """All pmfs on ``size`` symbols whose entries are multiples of 1/steps."""
    if size < 1 or steps < 1:
        raise RegionError("grid needs size >= 1 and steps >= 1")
    if size == 1:
        return np.ones((1, 1))
    rows = []
    for cuts in itertools.combinations(range(steps + size - 1), size - 1):
        edges = (-1,) + cuts + (steps + size - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(size)])
    return np.array(rows, dtype=float) / steps


@dataclass(frozen=True)
class SearchGrid:
    """
    Resolution of the distribution search.

    ``steps`` applies to the uplink inputs and to p(xR); ``u_steps`` to p(u)
    and each row of p(xR | u) in the hash-and-forward search, where the
    auxiliary alphabet has ``u_size`` symbols (default |XR| + 1).
    """

    steps: int = 64
    u_steps: int = 8
    u_size: Optional[int] = None

    def __post_init__(self):
        if self.steps < 1 or self.u_steps < 1:
            raise RegionError("grid must have at least one step")
        if self.u_size is not None and self.u_size < 1:
            raise RegionError("u_size must be positive")


def _warn_size(n: int, what: str) -> None:
    if n > GRID_WARN_POINTS:
        warnings.warn(f"{what} grid has {n} points; expect long runtimes", RuntimeWarning, stacklevel=3)


@dataclass(frozen=True)
class UplinkTerms:
    """Per-grid-point uplink information terms (1-D arrays, one entry per point)."""

    p12: np.ndarray
    p21: np.ndarray
    i12: np.ndarray        # I(X12; YR | X21)
    i21: np.ndarray        # I(X21; YR | X12)
    isum: np.ndarray       # I(X12, X21; YR)
    h_noise: np.ndarray    # H(YR | X12, X21)
    h_given_12: np.ndarray  # H(YR | X12)
    h_given_21: np.ndarray  # H(YR | X21)


def uplink_terms(uplink: Kernel, steps: int) -> UplinkTerms:
    if uplink.arity != 2:
        raise RegionError("uplink kernel must take two inputs")
    m12, m21 = uplink.input_sizes
    g12, g21 = simplex_grid(m12, steps), simplex_grid(m21, steps)
    _warn_size(len(g12) * len(g21), "uplink")
    p12 = np.repeat(g12, len(g21), axis=0)
    p21 = np.tile(g21, (len(g12), 1))
    W = uplink.table
    h_rows = entropy_bits(W)                                  # (m12, m21)
    h_noise = np.einsum("ba,bc,ac->b", p12, p21, h_rows)
    y_given_21 = np.einsum("ba,acy->bcy", p12, W)             # p(y | x21)
    y_given_12 = np.einsum("bc,acy->bay", p21, W)             # p(y | x12)
    h_given_21 = np.einsum("bc,bc->b", p21, entropy_bits(y_given_21))
    h_given_12 = np.einsum("ba,ba->b", p12, entropy_bits(y_given_12))
    py = np.einsum("bc,bcy->by", p21, y_given_21)
    h_y = entropy_bits(py)
    clip = lambda v: np.maximum(v, 0.0)
    return UplinkTerms(
        p12=p12, p21=p21,
        i12=clip(h_given_21 - h_noise),
        i21=clip(h_given_12 - h_noise),
        isum=clip(h_y - h_noise),
        h_noise=h_noise, h_given_12=h_given_12, h_given_21=h_given_21,
    )


def _channel_mi(px: np.ndarray, kernel: Kernel) -> np.ndarray:
    """I(X; Y) for a batch of input pmfs (rows of ``px``)."""
    W = kernel.table
    return np.maximum(entropy_bits(px @ W) - px @ entropy_bits(W), 0.0)


def _check_dl(dl1: Kernel, dl2: Kernel) -> int:
    if dl1.arity != 1 or dl2.arity != 1:
        raise RegionError("downlink kernels must take one input")
    if dl1.input_sizes != dl2.input_sizes:
        raise RegionError("downlink kernels must share the relay input alphabet")
    return dl1.input_sizes[0]


def downlink_terms(dl1: Kernel, dl2: Kernel, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """(I(XR; Y1), I(XR; Y2)) over the p(xR) grid."""
    g = simplex_grid(_check_dl(dl1, dl2), steps)
    _warn_size(len(g), "downlink")
    return _channel_mi(g, dl1), _channel_mi(g, dl2)


def refinement_terms(dl1: Kernel, dl2: Kernel, u_steps: int, u_size: Optional[int] = None):
    """
    Superposition-coding terms over the grid of p(u) and p(xR | u).

    Returns a dict of 1-D arrays ``iu1``, ``iu2`` (I(U; Yk)) and ``ix1u``,
    ``ix2u`` (I(XR; Yk | U)), plus ``pu`` (B, |U|) and ``pxu`` (B, |U|, |XR|).
    """
    mx = _check_dl(dl1, dl2)
    mu = u_size if u_size is not None else mx + 1
    gu = simplex_grid(mu, u_steps)
    gx = simplex_grid(mx, u_steps)
    _warn_size(len(gu) * len(gx) ** mu, "refinement")
    rows = np.array(list(itertools.product(range(len(gx)), repeat=mu)))
    pxu_choices = gx[rows]                                    # (R, mu, mx)
    pu = np.repeat(gu, len(rows), axis=0)                     # (B, mu)
    ridx = np.tile(np.arange(len(rows)), len(gu))
    out = {"pu": pu, "pxu": pxu_choices[ridx]}
    for k, W in (("1", dl1.table), ("2", dl2.table)):
        # per-choice quantities that do not depend on p(u)
        y_given_u = pxu_choices @ W                           # (R, mu, |Y|)
        h_y_given_u = entropy_bits(y_given_u)
        i_x_y_given_u = np.maximum(h_y_given_u - pxu_choices @ entropy_bits(W), 0.0)
        py = np.einsum("bu,buy->by", pu, y_given_u[ridx])
        out["iu" + k] = np.maximum(entropy_bits(py) - np.einsum("bu,bu->b", pu, h_y_given_u[ridx]), 0.0)
        out["ix" + k + "u"] = np.einsum("bu,bu->b", pu, i_x_y_given_u[ridx])
    return out


def _front_indices(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Indices of Pareto-optimal pairs (a, b), both maximised."""
    order = np.lexsort((-b, -a))
    keep = []
    best = -np.inf
    for i in order:
        if b[i] > best + TOL:
            keep.append(i)
            best = b[i]
    return np.array(keep, dtype=int)


def _grid(grid) -> SearchGrid:
    if grid is None:
        return SearchGrid()
    if isinstance(grid, int):
        return SearchGrid(steps=grid)
    return grid


# ------------------------------------------------------------------------------
# regions

def cutset_outer_bound(uplink: Kernel, dl1: Kernel, dl2: Kernel, grid=None,
                       time_sharing: bool = True) -> RateRegion:
    """R12 <= min{I(X12;YR|X21), I(XR;Y2)}, R21 <= min{I(X21;YR|X12), I(XR;Y1)}."""
    g = _grid(grid)
    up = uplink_terms(uplink, g.steps)
    d1, d2 = downlink_terms(dl1, dl2, g.steps)
    ui = _front_indices(up.i12, up.i21)
    di = _front_indices(d2, d1)
    r12 = np.minimum.outer(up.i12[ui], d2[di]).ravel()
    r21 = np.minimum.outer(up.i21[ui], d1[di]).ravel()
    return RateRegion.from_points(np.column_stack([r12, r21]), "outer", time_sharing,
                                  {"steps": g.steps})


def df_region(uplink: Kernel, dl1: Kernel, dl2: Kernel, grid=None,
              time_sharing: bool = True) -> RateRegion:
    """Decode-and-forward: the cut-set caps plus R12 + R21 <= I(X12, X21; YR)."""
    g = _grid(grid)
    up = uplink_terms(uplink, g.steps)
    d1, d2 = downlink_terms(dl1, dl2, g.steps)
    di = _front_indices(d2, d1)
    c12 = np.minimum.outer(up.i12, d2[di])
    c21 = np.minimum.outer(up.i21, d1[di])
    s = np.broadcast_to(up.isum[:, None], c12.shape)
    # corners of the pentagon for every (uplink, downlink) pair
    a = np.column_stack([c12.ravel(), np.clip(np.minimum(c21, s - c12), 0, None).ravel()])
    b = np.column_stack([np.clip(np.minimum(c12, s - c21), 0, None).ravel(), c21.ravel()])
    return RateRegion.from_points(np.vstack([a, b]), "df", time_sharing, {"steps": g.steps})


def hf_caps(i12, i21, h_noise, common, refine):
    """
    Hash-and-forward caps when node 1 receives the fine bin index (array-friendly).

    ``common`` is the rate of the coarse index both nodes decode and
    ``refine`` the extra rate of the fine index, i.e. I(U; Y2) and
    I(XR; Y1 | U) for a downlink where Y2 is degraded with respect to Y1:

        r12 <= min{I(X12;YR|X21), [common - H(YR|X12,X21)]+}
        r21 <= min{I(X21;YR|X12), [common + refine - H(YR|X12,X21)]+}
    """
    r12 = np.minimum(i12, np.maximum(np.subtract(common, h_noise), 0.0))
    r21 = np.minimum(i21, np.maximum(np.add(common, refine) - h_noise, 0.0))
    return r12, r21


def hf_candidates(uplink: Kernel, dl1: Kernel, dl2: Kernel, grid=None):
    """
    Hash-and-forward rate pairs for every uplink grid point.

    The coarse layer must be decodable by both nodes, so its rate is
    min{I(U;Y1), I(U;Y2)}; for a degraded downlink this is exactly the
    weaker node's I(U;Y). Both assignments of the fine index (to node 1 or
    to node 2) are searched. Returns ``(up, r12, r21)`` where ``r12``/``r21``
    have shape (uplink points, downlink choices).
    """
    g = _grid(grid)
    up = uplink_terms(uplink, g.steps)
    rt = refinement_terms(dl1, dl2, g.u_steps, g.u_size)
    common = np.minimum(rt["iu1"], rt["iu2"])
    r12s, r21s = [], []
    # fine index to node 1
    di = _front_indices(common, common + rt["ix1u"])
    a, b = hf_caps(up.i12[:, None], up.i21[:, None], up.h_noise[:, None],
                   common[di][None, :], rt["ix1u"][di][None, :])
    r12s.append(a)
    r21s.append(b)
    # fine index to node 2: same caps with the roles of the nodes exchanged
    di = _front_indices(common, common + rt["ix2u"])
    b, a = hf_caps(up.i21[:, None], up.i12[:, None], up.h_noise[:, None],
                   common[di][None, :], rt["ix2u"][di][None, :])
    r12s.append(a)
    r21s.append(b)
    return up, np.hstack(r12s), np.hstack(r21s)


def hf_region(uplink: Kernel, dl1: Kernel, dl2: Kernel, grid=None,
              time_sharing: bool = True) -> RateRegion:
    g = _grid(grid)
    _, r12, r21 = hf_candidates(uplink, dl1, dl2, g)
    return RateRegion.from_points(np.column_stack([r12.ravel(), r21.ravel()]), "hf", time_sharing,
                                  {"steps": g.steps, "u_steps": g.u_steps,
                                   "u_size": g.u_size if g.u_size is not None else dl1.input_sizes[0] + 1})


def shannon_inner_bound(uplink: Kernel, grid=None, time_sharing: bool = True) -> RateRegion:
    """Union over independent inputs of (I(X12;YR|X21), I(X21;YR|X12))."""
    g = _grid(grid)
    up = uplink_terms(uplink, g.steps)
    return RateRegion.from_points(np.column_stack([up.i12, up.i21]), "shannon-inner", time_sharing,
                                  {"steps": g.steps})


# ------------------------------------------------------------------------------
# single-distribution evaluations through the joint-pmf measures

def cutset_point(uplink: Kernel, dl1: Kernel, dl2: Kernel, d12: Pmf, d21: Pmf, pxr: Pmf) -> RatePoint:
    up = joint_from(uplink, d12, d21)
    j1 = joint_single(dl1, pxr, ("xR", "y1"))
    j2 = joint_single(dl2, pxr, ("xR", "y2"))
    return RatePoint(
        min(conditional_mutual_information(up, "x12", "yR", "x21"), mutual_information(j2, "xR", "y2")),
        min(conditional_mutual_information(up, "x21", "yR", "x12"), mutual_information(j1, "xR", "y1")),
    )


def refinement_joint(pu: Pmf, pxr_given_u: Kernel, dl1: Kernel, dl2: Kernel) -> JointPmf:
    """p(u, xR, y1, y2) = p(u) p(xR|u) p(y1|xR) p(y2|xR)."""
    if pxr_given_u.arity != 1 or pxr_given_u.input_sizes[0] != pu.size:
        raise RegionError("p(xR|u) does not match p(u)")
    if dl1.input_sizes[0] != pxr_given_u.output_size or dl2.input_sizes[0] != pxr_given_u.output_size:
        raise RegionError("downlink kernels do not match the relay alphabet")
    t = np.einsum("u,ux,xa,xb->uxab", pu.probs, pxr_given_u.table, dl1.table, dl2.table)
    return JointPmf(t / t.sum(), ("u", "xR", "y1", "y2"))


def bc_refinement_rates(pu: Pmf, pxr_given_u: Kernel, dl1: Kernel, dl2: Kernel) -> DlRefinementRates:
    """
    rr2 = I(U; Y2), rr1 = rr2 + I(XR; Y1 | U).

    Node 1 is the fine-index receiver; the pair is only achievable when Y2 is
    degraded with respect to Y1 (otherwise node 1 may not decode U at rr2).
    """
    j = refinement_joint(pu, pxr_given_u, dl1, dl2)
    rr2 = mutual_information(j, "u", "y2")
    return DlRefinementRates(rr2 + conditional_mutual_information(j, "xR", "y1", "u"), rr2)


def strong_dl_condition(uplink: Kernel, dl: Kernel, dists: Sequence[Pmf]) -> bool:
    """I(XR; Y1) >= max{H(YR|X12), H(YR|X21)} for dists = (p(x12), p(x21), p(xR))."""
    d12, d21, pxr = dists
    up = joint_from(uplink, d12, d21)
    i_dl = mutual_information(joint_single(dl, pxr, ("xR", "y")), "xR", "y")
    need = max(conditional_entropy(up, "yR", "x12"), conditional_entropy(up, "yR", "x21"))
    return i_dl >= need - TOL


# ------------------------------------------------------------------------------
# binary adder channel

def _cap(eps: float) -> float:
    return 1.0 - binary_entropy(eps)


def binary_adder_outer(p: BinaryAdderParams) -> RatePoint:
    """Cut-set corner of the binary adder channel (achieved by uniform inputs)."""
    return RatePoint(min(_cap(p.eps_r), _cap(p.eps_2)), min(_cap(p.eps_r), _cap(p.eps_1)))


def pnc_slacks(alpha: float, rates: RatePoint, p: BinaryAdderParams) -> tuple[float, float, float, float]:
    """Slack of each of the four PNC rate conditions (negative means violated)."""
    cr = _cap(p.eps_r)
    return (
        (1.0 - alpha) * cr - (rates.r12 - rates.r21),   # phase-1 codebook C_12
        alpha * cr - rates.r21,                         # sum decoding of C_c
        _cap(p.eps_1) - rates.r21,                      # receiver 1
        _cap(p.eps_2) - rates.r12,                      # receiver 2
    )


def pnc_feasible(alpha: float, rates: RatePoint, p: BinaryAdderParams, delta: float = 0.0) -> bool:
    """All four PNC conditions hold with slack at least ``delta``."""
    if not 0.0 <= alpha <= 1.0:
        raise RegionError(f"alpha out of range: {alpha}")
    if rates.r12 < rates.r21:
        raise RegionError("pnc_feasible expects r12 >= r21; relabel the nodes first")
    return all(s >= delta - TOL for s in pnc_slacks(alpha, rates, p))


def regime_alpha(p: BinaryAdderParams) -> RegimePoint:
    """
    Operating point of the time-shared PNC scheme.

    Node 1 is taken to have the noisier downlink; when eps_2 > eps_1 (and the
    relay is not the bottleneck) the nodes are relabeled, classified, and the
    rates are mapped back.
    """
    er, e1, e2 = p.eps_r, p.eps_1, p.eps_2
    if er >= max(e1, e2):
        c = _cap(er)
        return RegimePoint("strong", 1.0, RatePoint(c, c))
    if e2 > e1:
        rp = regime_alpha(p.relabeled())
        return RegimePoint(rp.regime, rp.alpha, rp.rates.swapped(), swapped=True)
    if e1 >= er >= e2:
        regime, hi = "medium", _cap(er)
    elif e1 >= e2 >= er:
        regime, hi = "weak", _cap(e2)
    else:  # pragma: no cover - orderings above are exhaustive
        raise RegionError(f"no regime matches {p}")
    lo = _cap(e1)
    alpha = min(lo / hi, 1.0) if hi > 0 else 1.0
    return RegimePoint(regime, alpha, RatePoint(hi, lo))
