"""Strand stripings, redundancy checkerboards, and perfect colourings.

A striping colours warps and wefts either thinly (alternately pale/dark,
period 2) or thickly (pale, pale, dark, dark; period 4), with independent
phases for the two directions.  Strand k is dark when
(k - phase) mod 4 is 2 or 3 (thick) or (k - phase) mod 2 is 1 (thin), so
phase 0 starts pale.

A cell is redundant when its two strands carry the same colour; the
pattern shown on a side is the colour of the strand on top there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import PreconditionError
from .grid import Isometry, TorusDesign, cell_maps
from .symmetry import SymGroup, detect_group


@dataclass(frozen=True)
class Striping:
    kind: str  # "thin" | "thick"
    warp_phase: int = 0
    weft_phase: int = 0

    def __post_init__(self):
        if self.kind not in ("thin", "thick"):
            raise PreconditionError(f"striping kind must be thin or thick, got {self.kind!r}")
        p = self.period
        object.__setattr__(self, "warp_phase", self.warp_phase % p)
        object.__setattr__(self, "weft_phase", self.weft_phase % p)

    @property
    def period(self) -> int:
        return 2 if self.kind == "thin" else 4

    def strand_dark(self, index: int, phase: int) -> bool:
        if self.kind == "thin":
            return (index - phase) % 2 == 1
        return (index - phase) % 4 in (2, 3)

    def warp_colour(self, i: int) -> bool:
        return self.strand_dark(i, self.warp_phase)

    def weft_colour(self, j: int) -> bool:
        return self.strand_dark(j, self.weft_phase)

    def colours(self, n: int):
        idx = np.arange(n)
        if self.kind == "thin":
            wc = (idx - self.warp_phase) % 2 == 1
            fc = (idx - self.weft_phase) % 2 == 1
        else:
            wc = np.isin((idx - self.warp_phase) % 4, (2, 3))
            fc = np.isin((idx - self.weft_phase) % 4, (2, 3))
        return wc, fc

    def reversed_colours(self) -> "Striping":
        h = self.period // 2
        return Striping(self.kind, self.warp_phase + h, self.weft_phase + h)


class ColouredFabric:
    """A design together with a striping of its strands.

    Work happens at period L = lcm(n, striping period) so that the
    checkerboard of redundant cells is fully represented.
    """

    def __init__(self, design: TorusDesign, striping: Striping):
        self.design = design
        self.striping = striping
        self.L = math.lcm(design.n, striping.period)
        self.expanded = design.tiled(self.L // design.n) if self.L != design.n else design
        self.warp_colours, self.weft_colours = striping.colours(self.L)

    def redundancy_map(self) -> TorusDesign:
        """Pattern whose bit marks redundant cells (same colour meets itself)."""
        r = self.warp_colours[:, None] == self.weft_colours[None, :]
        return TorusDesign(r, role="pattern")

    def obverse_pattern(self) -> TorusDesign:
        """Colour of the top strand in each cell."""
        top = np.where(self.expanded.arr, self.warp_colours[:, None], self.weft_colours[None, :])
        return TorusDesign(top, role="pattern")

    def reverse_pattern(self) -> TorusDesign:
        """Colour of the bottom strand, mirrored about a vertical axis
        (the convention for displaying the other side)."""
        bottom = np.where(
            self.expanded.arr, self.weft_colours[None, :], self.warp_colours[:, None]
        )
        return TorusDesign(bottom[::-1, :], role="pattern")

    @cached_property
    def group(self) -> SymGroup:
        return detect_group(self.expanded)

    def is_perfect(self) -> bool:
        """Every symmetry of the design permutes strand colours globally:
        it preserves every strand colour or swaps pale and dark."""
        L = self.L
        colours = np.concatenate([self.warp_colours, self.weft_colours])
        for g in self.group:
            perm = self.group.strand_perm(g)
            image = colours[perm]
            if not (np.array_equal(image, colours) or np.array_equal(image, ~colours)):
                return False
        return True


def preserves_blocks(g: Isometry, s: Striping) -> bool:
    """Whether g maps the redundancy checkerboard of s to itself
    (redundant cells to redundant cells, irredundant to irredundant)."""
    p = s.period
    wc, fc = s.colours(p)
    r = wc[:, None] == fc[None, :]
    ip, jp = cell_maps(g.canon(p), p)
    return bool(np.array_equal(r[ip, jp], r))


def is_perfect(design: TorusDesign, striping: Striping) -> bool:
    return ColouredFabric(design, striping).is_perfect()


@dataclass(frozen=True)
class StripingClass:
    """Equivalence class of stripings modulo global colour reversal and
    the design's own side-preserving translations."""

    representative: Striping
    members: tuple[Striping, ...]
    perfect: bool


def striping_classes(d: TorusDesign, kinds=("thin", "thick")) -> list[StripingClass]:
    """All striping classes of d (at most two thin and two thick),
    annotated with strict perfection."""
    classes: list[StripingClass] = []
    for kind in kinds:
        period = 2 if kind == "thin" else 4
        cf0 = ColouredFabric(d, Striping(kind))
        group = detect_group(cf0.expanded)
        shifts = {
            (g.t[0] // 2 % period, g.t[1] // 2 % period)
            for g in group.translations
            if not g.tau
        }
        perfect_cache = {}

        def is_perf(s):
            key = (s.kind, s.warp_phase, s.weft_phase)
            if key not in perfect_cache:
                cf = ColouredFabric(d, s)
                cf.__dict__["group"] = group
                perfect_cache[key] = cf.is_perfect()
            return perfect_cache[key]

        seen = set()
        for wp in range(period):
            for fp in range(period):
                if (wp, fp) in seen:
                    continue
                member_keys = set()
                for dx, dy in shifts:
                    for flip in (0, period // 2):
                        member_keys.add(((wp + dx + flip) % period, (fp + dy + flip) % period))
                seen |= member_keys
                members = tuple(Striping(kind, a, b) for a, b in sorted(member_keys))
                classes.append(
                    StripingClass(members[0], members, all(is_perf(m) for m in members))
                )
    return classes


def perfect_stripings(d: TorusDesign) -> list[StripingClass]:
    """Striping classes whose members are all perfect colourings."""
    return [c for c in striping_classes(d) if c.perfect]


def double_striped(d: TorusDesign, s: Striping):
    """Double a thinly striped fabric: strands double and carry their
    colours, giving the thick striping with doubled phases."""
    from .grid import double

    if s.kind != "thin":
        raise PreconditionError("doubling a striping is defined for thin stripings")
    return double(d), Striping("thick", 2 * s.warp_phase, 2 * s.weft_phase)


def thin_double_equals_double_thick(d: TorusDesign, s: Striping) -> bool:
    """Check that doubling a thin-striped fabric reproduces the thick
    striping (with doubled phases) of the doubled design: same design,
    same strand colours, hence same redundancy map and patterns."""
    from .grid import double

    dd, thick = double_striped(d, s)
    direct = ColouredFabric(double(d), thick)
    # construct the doubled colouring explicitly from the thin one
    L = direct.L
    wc_thin, fc_thin = s.colours(L)  # colours by original strand index
    wc = np.array([wc_thin[k // 2] for k in range(L)])
    fc = np.array([fc_thin[k // 2] for k in range(L)])
    return (
        dd == double(d)
        and np.array_equal(wc, direct.warp_colours)
        and np.array_equal(fc, direct.weft_colours)
    )
