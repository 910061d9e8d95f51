"""Per-collection caches shared by the degree engine and the position checks.

Point sets are bitmasks over point indices.  For a set ``S``,
``span(S)`` is the linear span of the homogenized points ``(c_j, 1)``,
``j in S``.  Its annihilator (integer rows ``y`` with
``y . (c_j, 1) = 0``) describes the affine hull of ``S``
(``x in aff(S)`` iff ``A (x, 1) = 0``) and the linear affine hull
(``v in linaff(S)`` iff ``A (v, 0) = 0``).  An empty ``S`` has the full
identity as annihilator, so intersections involving it are empty / zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .exact import bareiss_det, homogenize, int_rank, integer_row, nullspace
from .model import BmzCollection, RookPlacement, board_options
from .transform import WBasis, clone, make_w_basis


def mask_indices(mask: int) -> tuple[int, ...]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


def cramer(a: Sequence[Sequence[int]], b: Sequence[int]) -> tuple[int, list[int]]:
    """``(det a, det(a) * a^{-1} b)`` for a square integer system."""
    n = len(a)
    det = bareiss_det([list(row) for row in a])
    if det == 0:
        return 0, []
    nums = []
    for col in range(n):
        m = [list(row) for row in a]
        for i in range(n):
            m[i][col] = b[i]
        nums.append(bareiss_det(m))
    return det, nums


@dataclass(frozen=True)
class SubsetInfo:
    indices: tuple[int, ...]
    independent: bool
    annihilator: tuple[tuple[int, ...], ...]
    # an invertible square block of the (d+1) x |S| matrix of integer-scaled
    # homogenized points: its row choice, adjugate and determinant
    pivot_rows: tuple[int, ...] = ()
    block_adj: tuple[tuple[int, ...], ...] = ()
    block_det: int = 1


class CollectionGeometry:
    def __init__(self, c: BmzCollection, w: WBasis | None = None):
        self.c = c
        self.w = w or make_w_basis(c.r)
        self.d, self.r, self.n = c.d, c.r, c.n
        self.hom = [homogenize(p) for p in c.points]
        # positive multiples of the homogenized points, integer valued
        self.hom_int = [integer_row(h) for h in self.hom]
        self.hom_scale = [Fraction(hi[-1]) for hi in self.hom_int]
        self._subsets: dict[int, SubsetInfo] = {}
        self._clone_rows: dict[tuple[int, int], list[int]] = {}
        self._aff_memo: dict[frozenset, bool] = {}
        self._degen_memo: dict[frozenset, bool] = {}
        self.board_masks = self._make_board_masks()

    def _make_board_masks(self):
        r = self.r
        out = []
        for k in range(self.d + 1):
            per_opt = []
            for opt in board_options(r):
                rows = [0] * r
                for j, row in enumerate(opt):
                    rows[row] |= 1 << (k * (r - 1) + j)
                per_opt.append(tuple(rows))
            out.append(tuple(per_opt))
        return out

    def class_masks(self, p: RookPlacement) -> list[int]:
        """Bitmasks of the partition classes, apex excluded."""
        masks = [0] * self.r
        for k, board in enumerate(p.boards):
            base = k * (self.r - 1)
            for j, row in enumerate(board):
                masks[row] |= 1 << (base + j)
        return masks

    @property
    def apex_bit(self) -> int:
        return 1 << self.n

    # -- subsets ---------------------------------------------------------
    def subset(self, mask: int) -> SubsetInfo:
        info = self._subsets.get(mask)
        if info is None:
            info = self._build_subset(mask)
            self._subsets[mask] = info
        return info

    def _build_subset(self, mask: int) -> SubsetInfo:
        idx = mask_indices(mask)
        dim = self.d + 1
        pts = [self.hom_int[j] for j in idx]
        kernel = nullspace(pts, dim) if pts else nullspace([], dim)
        ann = tuple(tuple(integer_row(v)) for v in kernel)
        independent = int_rank(pts) == len(idx)
        if not independent or not idx:
            return SubsetInfo(idx, independent, ann)
        chosen: list[int] = []
        for k in range(dim):
            trial = chosen + [k]
            if int_rank([[p[i] for p in pts] for i in trial]) == len(trial):
                chosen = trial
            if len(chosen) == len(idx):
                break
        m = len(idx)
        block = [[pts[j][i] for j in range(m)] for i in chosen]
        det = bareiss_det([list(row) for row in block])
        # adj[t][s] = det * (block^{-1})[t][s]
        cols = [cramer(block, [int(s == t) for t in range(m)])[1] for s in range(m)]
        adj = tuple(tuple(cols[s][t] for s in range(m)) for t in range(m))
        return SubsetInfo(idx, True, ann, tuple(chosen), adj, det)

    # -- direct-space predicates on partitions (order of classes irrelevant)
    def affine_tverberg(self, masks: Sequence[int]) -> bool:
        """Do the affine hulls of the classes share a point?"""
        key = frozenset(masks)
        hit = self._aff_memo.get(key)
        if hit is None:
            stack = [row for s in key for row in self.subset(s).annihilator]
            if not stack:
                hit = True
            else:
                hit = int_rank([row[:-1] for row in stack]) == int_rank(stack)
            self._aff_memo[key] = hit
        return hit

    def facet_degenerate(self, masks: Sequence[int]) -> bool:
        """Some class affinely dependent, or a common nonzero direction."""
        key = frozenset(masks)
        hit = self._degen_memo.get(key)
        if hit is None:
            infos = [self.subset(s) for s in key]
            if any(not info.independent for info in infos):
                hit = True
            else:
                stack = [row[:-1] for info in infos for row in info.annihilator]
                hit = int_rank(stack) < self.d if stack else True
            self._degen_memo[key] = hit
        return hit

    # -- transform space -------------------------------------------------
    def clone_row(self, j: int, i: int) -> list[int]:
        """Integer multiple (positive factor) of the ``i``-th clone of ``c_j``."""
        key = (j, i)
        row = self._clone_rows.get(key)
        if row is None:
            row = integer_row(clone(self.c.points[j], i, self.w))
            self._clone_rows[key] = row
        return row

    def clone(self, j: int, i: int):
        return clone(self.c.points[j], i, self.w)


class ReducedRaySolver:
    """Solve ``M^T mu = dir`` for a facet using the tensor block structure.

    With ``S_i = sum_{j in R_i - z} mu_j (c_j, 1)`` and ``dir`` reshaped to a
    ``(d+1) x (r-1)`` matrix with columns ``D_k``, the equation
    ``sum_i S_i (x) w_i = dir`` has the solution family
    ``S_i = E_i + s`` where ``E_k = (D_k + sum D)/r`` for ``k < r-1``,
    ``E_{r-1} = 0`` and ``s = S_{r-1}``.  Membership of every ``S_i`` in
    ``span(R_i - z)`` pins ``s`` by a ``(d+1)``-square system.

    Everything runs in integers.  The direction is scaled by ``self.scale``
    so the ``E_i`` are integral, and the solve works against the
    integer-scaled homogenized points; :meth:`solve` therefore returns, per
    class, numerators ``num_j`` and a common denominator ``den`` with
    ``mu_j = num_j * hom_scale_j / (den * scale)``.
    """

    def __init__(self, geom: CollectionGeometry, direction: Sequence[Fraction]):
        self.g = geom
        d, r = geom.d, geom.r
        dim = d + 1
        if len(direction) != geom.n:
            raise ValueError("ray direction has the wrong dimension")
        self.direction = tuple(Fraction(x) for x in direction)
        denom = 1
        for x in self.direction:
            denom = lcm(denom, x.denominator)
        self.scale = r * denom
        cols = [[int(self.direction[a * (r - 1) + k] * self.scale) for a in range(dim)] for k in range(r - 1)]
        total = [sum(col[a] for col in cols) for a in range(dim)]
        self.E = [tuple((cols[k][a] + total[a]) // r for a in range(dim)) for k in range(r - 1)]
        self.E.append(tuple(0 for _ in range(dim)))
        self._ae: dict[tuple[int, int], list[int]] = {}

    def _ann_e(self, mask: int, i: int, info: SubsetInfo) -> list[int]:
        key = (mask, i)
        val = self._ae.get(key)
        if val is None:
            e = self.E[i]
            val = [-sum(a * b for a, b in zip(row, e)) for row in info.annihilator]
            self._ae[key] = val
        return val

    def solve(self, masks: Sequence[int]):
        """List of ``(info, nums, den)`` per nonempty class, or None when
        the facet matrix is singular."""
        g = self.g
        infos = [g.subset(m) for m in masks]
        for info in infos:
            if not info.independent:
                return None
        k_rows: list[Sequence[int]] = []
        h: list[int] = []
        for i, (m, info) in enumerate(zip(masks, infos)):
            k_rows.extend(info.annihilator)
            h.extend(self._ann_e(m, i, info))
        det_k, y = cramer(k_rows, h)
        if det_k == 0:
            return None
        out = []
        for i, info in enumerate(infos):
            if not info.indices:
                continue
            e = self.E[i]
            v = [e[a] * det_k + y[a] for a in info.pivot_rows]
            nums = [sum(x * t for x, t in zip(row, v)) for row in info.block_adj]
            out.append((info, nums, det_k * info.block_det))
        return out
