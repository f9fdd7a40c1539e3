"""Rebuilding a plain-quarter-turn fabric behind a fall-apart design.

Given the design of a quarter-turn prefabric that falls apart (genus-V
rows, mixed-flag species 37), reconstruct a fabric, all of whose
quarter-turns are side-preserving (species 33_4), whose thick striping
shows the given design:

  * blocks are classified redundant/irredundant from the alternating
    row/column pairs;
  * irredundant blocks are copied from the design in the predominantly
    pale rows and reversed in the predominantly dark ones;
  * redundant blocks holding a reversing quarter-turn are woven as 2x2
    diagonal blocks, oriented the same way as (or opposite to) the blocks
    holding the plain quarter-turns;
  * the remaining redundant blocks are free; the default fill is half
    dark / half pale with a straight boundary, and a search fill walks
    all free assignments until the rebuilt fabric has no excess symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalogue import cell_orbits
from .errors import DesignParseError, InvariantError, PreconditionError
from .grid import Isometry, TorusDesign, _parse_grid, rot90_about
from .interlace import falls_apart
from .striping import ColouredFabric, Striping
from .symmetry import SymGroup, detect_group, group_from_generators, signature, species
from .symmetry import species_of


class PartialDesign:
    """n x n grid of dark (1) / pale (0) / undetermined (-1)."""

    def __init__(self, grid):
        a = np.asarray(grid, dtype=np.int8).copy()
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise PreconditionError("partial design grid must be square")
        if not np.isin(a, (-1, 0, 1)).all():
            raise PreconditionError("cells must be -1, 0, or 1")
        a.setflags(write=False)
        self.grid = a

    @property
    def n(self):
        return self.grid.shape[0]

    @classmethod
    def from_text(cls, text):
        grid, _ = _parse_grid(text, allow_unknown=True)
        return cls(grid)

    @classmethod
    def from_design(cls, d: TorusDesign, known_mask):
        g = np.where(np.asarray(known_mask, dtype=bool), d.arr.astype(np.int8), -1)
        return cls(g)

    def to_text(self):
        n = self.n
        rows = []
        for j in range(n - 1, -1, -1):
            rows.append(
                "".join({1: "#", 0: ".", -1: "?"}[int(self.grid[i, j])] for i in range(n))
            )
        return f"order: {n}\n" + "\n".join(rows) + "\n"


@dataclass
class BlockStructure:
    """Checkerboard of 2x2 blocks anchored on the reversing quarter-turns."""

    n: int
    bx: int  # anchor cell corner, cell units
    by: int
    dark_cols: np.ndarray  # per-column class
    dark_rows: np.ndarray

    def block_index(self, i, j):
        return (i - (self.bx - 1)) // 2, (j - (self.by - 1)) // 2

    def is_redundant(self, i, j):
        bi, bj = self.block_index(i, j)
        return (bi - bj) % 2 == 0

    def block_cells(self, bi, bj):
        i0 = self.bx - 1 + 2 * bi
        j0 = self.by - 1 + 2 * bj
        return [(i0 % self.n, j0 % self.n), ((i0 + 1) % self.n, j0 % self.n),
                (i0 % self.n, (j0 + 1) % self.n), ((i0 + 1) % self.n, (j0 + 1) % self.n)]

    def block_centre(self, bi, bj):
        return ((2 * self.bx + 4 * bi) % (2 * self.n), (2 * self.by + 4 * bj) % (2 * self.n))


def _analyse_pattern(p: TorusDesign):
    """Detect the group, locate the two quarter-turn lattices, classify
    rows/columns, and validate the block alignment of the design."""
    n = p.n
    group = detect_group(p)
    sig = signature(group)
    sp = species(sig)
    if sp.name != "37":
        raise PreconditionError(f"input is species {sp.name}, expected 37")
    fa, _ = falls_apart(p)
    if not fa:
        raise PreconditionError("input hangs together; expected a fall-apart design")
    if group.strand_orbits() != 1:
        raise PreconditionError("input is not isonemal")
    q = sig.quarter
    wh_anchor = q.corner_anchor if not q.corner_tau else q.centre_anchor
    bl_anchor = q.centre_anchor if not q.corner_tau else q.corner_anchor
    hi = 3 * n // 4
    dark_rows = p.arr.sum(axis=0) == hi
    dark_cols = p.arr.sum(axis=1) == hi
    blocks = BlockStructure(n, bl_anchor[0] // 2, bl_anchor[1] // 2, dark_cols, dark_rows)
    # genus-V row structure and monochrome redundant blocks
    for i in range(n):
        for j in range(n):
            if blocks.is_redundant(i, j):
                if dark_cols[i] != dark_rows[j]:
                    raise PreconditionError("row/column classes break on a redundant block")
                if bool(p.arr[i, j]) != bool(dark_cols[i]):
                    raise PreconditionError("redundant block is not monochrome in its class")
            else:
                if dark_cols[i] == dark_rows[j]:
                    raise PreconditionError("row/column classes break on an irredundant block")
    return group, sig, wh_anchor, bl_anchor, blocks


def _striping_for(blocks: BlockStructure) -> Striping:
    """Thick striping whose dark strands are exactly the dark classes."""
    n = blocks.n

    def phase(dark):
        for ph in range(4):
            if all((((k - ph) % 4 in (2, 3)) == bool(dark[k % n])) for k in range(n)):
                return ph
        raise InvariantError("column/row classes are not a thick striping")

    return Striping("thick", phase(blocks.dark_cols), phase(blocks.dark_rows))


@dataclass
class RebuildResult:
    fabric: TorusDesign
    striping: Striping
    intended_group: SymGroup
    species: str

    def roundtrip_pattern(self) -> TorusDesign:
        return ColouredFabric(self.fabric, self.striping).obverse_pattern()


def rebuild_33_4(
    p: TorusDesign,
    centre_block_weave: str = "same",
    free_block_fill: str = "straight",
) -> RebuildResult:
    """Rebuild a side-preserving quarter-turn fabric whose thick striping
    reproduces the fall-apart design p exactly."""
    if centre_block_weave not in ("same", "opposite"):
        raise PreconditionError("centre_block_weave must be 'same' or 'opposite'")
    if free_block_fill not in ("straight", "search"):
        raise PreconditionError("free_block_fill must be 'straight' or 'search'")
    n = p.n
    group, sig, wh_anchor, bl_anchor, blocks = _analyse_pattern(p)
    striping = _striping_for(blocks)
    intended = group_from_generators(
        [rot90_about(wh_anchor, False), rot90_about(bl_anchor, False)], n
    )
    system = cell_orbits(intended, n)
    if system.contradictory:
        raise PreconditionError("intended side-preserving group is inconsistent on this torus")

    root_value = {}

    def set_cell(i, j, value):
        idx = (i % n) * n + (j % n)
        r, par = int(system.root[idx]), int(system.parity[idx])
        want = bool(value) ^ bool(par)
        if r in root_value:
            if root_value[r] != want:
                raise PreconditionError("propagation contradiction (input not species 37?)")
            return False
        root_value[r] = want
        return True

    def get_cell(i, j):
        idx = (i % n) * n + (j % n)
        r, par = int(system.root[idx]), int(system.parity[idx])
        if r not in root_value:
            return None
        return root_value[r] ^ bool(par)

    # (1) irredundant blocks: copy in pale rows, reverse in dark rows
    for i in range(n):
        for j in range(n):
            if not blocks.is_redundant(i, j):
                val = bool(p.arr[i, j]) ^ bool(blocks.dark_rows[j])
                set_cell(i, j, val)

    # (2) redundant blocks holding the old reversing quarter-turns become
    # diagonal blocks, oriented relative to the plain-quarter-turn blocks
    ref_cell = (wh_anchor[0] // 2 - 1, wh_anchor[1] // 2 - 1)
    v_ref = get_cell(*ref_cell)
    if v_ref is None:
        raise InvariantError("reference block cell is undetermined")
    tgt_cell = (bl_anchor[0] // 2 - 1, bl_anchor[1] // 2 - 1)
    want = v_ref if centre_block_weave == "same" else (not v_ref)
    set_cell(*tgt_cell, want)

    # (3) free redundant blocks
    qcs = {c.position for c in intended.quarter_centres}
    free_blocks = []
    for bi in range(n // 2):
        for bj in range(n // 2):
            if (bi - bj) % 2:
                continue
            if blocks.block_centre(bi, bj) in qcs:
                continue
            free_blocks.append((bi, bj))

    def apply_straight():
        for bi, bj in sorted(free_blocks):
            cells = blocks.block_cells(bi, bj)
            for (ci, cj) in cells:
                if get_cell(ci, cj) is None:
                    # pale on the lower row of the block, dark on the upper
                    low_j = (blocks.by - 1 + 2 * bj) % n
                    set_cell(ci, cj, cj != low_j)

    snapshot = dict(root_value)
    apply_straight()
    # any orbit never touched (shouldn't happen, but stay deterministic)
    for r in system.roots:
        root_value.setdefault(r, False)

    def build():
        root_index = {r: k for k, r in enumerate(system.roots)}
        vals = np.array([root_value[r] for r in system.roots], dtype=bool)
        arr = vals[np.array([root_index[r] for r in system.root])] ^ system.parity.astype(bool)
        return TorusDesign(arr.reshape(n, n))

    fabric = build()
    if free_block_fill == "search":
        free_roots = [r for r in system.roots if r not in snapshot]
        best = None
        for bits in range(1 << len(free_roots)):
            for k, r in enumerate(free_roots):
                root_value[r] = bool((bits >> k) & 1)
            cand = build()
            name = species_of(cand).name
            if name == "33_4":
                best = cand
                break
        fabric = best if best is not None else fabric

    # verification: the fabric admits the intended group and the striping
    # reproduces the input exactly
    det = detect_group(fabric)
    for g in intended:
        if g not in det:
            raise InvariantError("rebuilt fabric lost an intended symmetry")
    pattern = ColouredFabric(fabric, striping).obverse_pattern()
    if pattern != p:
        raise InvariantError("striping the rebuilt fabric does not reproduce the input")
    return RebuildResult(fabric, striping, intended, species_of(fabric).name)


def verify_roundtrip(p: TorusDesign) -> bool:
    """Whether some choice setting rebuilds a fabric whose striping shows p
    and whose group contains the intended side-preserving group."""
    for weave in ("same", "opposite"):
        try:
            rebuild_33_4(p, centre_block_weave=weave, free_block_fill="straight")
            return True
        except (PreconditionError, InvariantError):
            continue
    try:
        rebuild_33_4(p, centre_block_weave="same", free_block_fill="search")
        return True
    except (PreconditionError, InvariantError):
        return False


def excess_symmetry_check(f: TorusDesign):
    """Species of a rebuilt fabric; anything but 33_4 signals extra
    symmetry and the caller may retry with different choices."""
    return species_of(f)


def mirror_fit(p: PartialDesign):
    """All strand-parallel mirror axes consistent with every determined
    cell, at half-cell granularity, with each side flag.

    Returns (direction, position, tau) triples; position is the doubled
    coordinate of the axis in [0, n), each standing for the pair of torus
    axes {position, position + n}.
    """
    n = p.n
    out = []
    for direction in ("mv", "mh"):
        for a in range(n):
            g = Isometry(direction, (2 * a, 0) if direction == "mv" else (0, 2 * a), False)
            ok = {False: True, True: True}
            for i in range(n):
                for j in range(n):
                    v = p.grid[i, j]
                    if v < 0:
                        continue
                    ii, jj = g.map_cell(i, j)
                    w = p.grid[ii % n, jj % n]
                    if w < 0:
                        continue
                    if w == v:
                        ok[True] = False
                    else:
                        ok[False] = False
                    if not ok[False] and not ok[True]:
                        break
                if not ok[False] and not ok[True]:
                    break
            for tau in (False, True):
                if ok[tau]:
                    out.append((direction, a, tau))
    return out
