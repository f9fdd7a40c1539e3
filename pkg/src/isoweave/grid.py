"""Exact integer geometry of periodic interlacement designs.

A design is an n x n boolean grid on a torus: bit (i, j) is True when
warp i (the vertical strand in column i) passes over weft j (the
horizontal strand in row j), which is drawn dark under the normal
colouring.

All geometry uses *doubled* coordinates so that every point of interest
is an integer pair: the centre of cell (i, j) sits at (2i+1, 2j+1) and
cell corners sit at even pairs.  Rotation centres and mirror axes at
half-integer positions therefore stay exact.

An isometry is a D4 linear part, a translation in doubled coordinates,
and a side-reversal flag ``tau``.  The single colour-transformation rule
consumed by every other module is

    D(g . c) = D(c) XOR tau(g) XOR roleswap(g)

where roleswap is 1 for the four D4 elements that exchange the warp and
weft directions (the two quarter-turns and the two diagonal mirrors).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DesignParseError, PreconditionError

# Linear parts as 2x2 integer matrices acting on column vectors (x, y).
# r90 maps (x, y) -> (y, -x); mv mirrors across a vertical axis, mh across
# a horizontal one, md across the main diagonal, ma across the antidiagonal.
LINEAR = {
    "r0": ((1, 0), (0, 1)),
    "r90": ((0, 1), (-1, 0)),
    "r180": ((-1, 0), (0, -1)),
    "r270": ((0, -1), (1, 0)),
    "mv": ((-1, 0), (0, 1)),
    "mh": ((1, 0), (0, -1)),
    "md": ((0, 1), (1, 0)),
    "ma": ((0, -1), (-1, 0)),
}
_NAME_OF = {m: k for k, m in LINEAR.items()}

ROTATIONS = ("r0", "r90", "r180", "r270")
MIRRORS = ("mv", "mh", "md", "ma")
# Elements exchanging the warp and weft directions.
ROLESWAP = frozenset({"r90", "r270", "md", "ma"})

_LINEAR_ORDER = {name: k for k, name in enumerate(LINEAR)}


def _matmul(a, b):
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


@dataclass(frozen=True, order=False)
class Isometry:
    """D4 linear part + translation in doubled coordinates + side flag."""

    linear: str
    t: tuple[int, int]
    tau: bool = False

    def __post_init__(self):
        if self.linear not in LINEAR:
            raise PreconditionError(f"unknown linear part {self.linear!r}")
        tx, ty = self.t
        # Cell-centre lattice invariant: linear(odd, odd) + t must be odd
        # in both coordinates, which for D4 elements means t is even.
        if tx % 2 or ty % 2:
            raise PreconditionError(f"translation {self.t} does not preserve cell centres")
        object.__setattr__(self, "t", (int(tx), int(ty)))
        object.__setattr__(self, "tau", bool(self.tau))

    @property
    def matrix(self):
        return LINEAR[self.linear]

    @property
    def roleswap(self) -> bool:
        return self.linear in ROLESWAP

    @property
    def flag(self) -> bool:
        """Complement flag of the colour rule: tau XOR roleswap."""
        return self.tau ^ self.roleswap

    def apply(self, x: int, y: int) -> tuple[int, int]:
        (a, b), (c, d) = LINEAR[self.linear]
        return (a * x + b * y + self.t[0], c * x + d * y + self.t[1])

    def map_cell(self, i: int, j: int) -> tuple[int, int]:
        """Image cell of cell (i, j), before any torus reduction."""
        x, y = self.apply(2 * i + 1, 2 * j + 1)
        return ((x - 1) // 2, (y - 1) // 2)

    def canon(self, n: int) -> "Isometry":
        """Reduce the translation modulo the 2n x 2n doubled torus."""
        return Isometry(self.linear, (self.t[0] % (2 * n), self.t[1] % (2 * n)), self.tau)

    def sort_key(self):
        return (_LINEAR_ORDER[self.linear], self.tau, self.t)

    def __repr__(self):
        return f"Isometry({self.linear}, t={self.t}, tau={int(self.tau)})"


IDENTITY = Isometry("r0", (0, 0), False)


def compose(g1: Isometry, g2: Isometry) -> Isometry:
    """Isometry acting as g1 followed by g2 (apply g1 first)."""
    m = _matmul(LINEAR[g2.linear], LINEAR[g1.linear])
    (a, b), (c, d) = LINEAR[g2.linear]
    tx = a * g1.t[0] + b * g1.t[1] + g2.t[0]
    ty = c * g1.t[0] + d * g1.t[1] + g2.t[1]
    return Isometry(_NAME_OF[m], (tx, ty), g1.tau ^ g2.tau)


def invert(g: Isometry) -> Isometry:
    m = LINEAR[g.linear]
    inv = ((m[1][1], -m[0][1]), (-m[1][0], m[0][0]))  # adjugate; det is +-1
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    inv = tuple(tuple(v * det for v in row) for row in inv)
    (a, b), (c, d) = inv
    return Isometry(_NAME_OF[inv], (-(a * g.t[0] + b * g.t[1]), -(c * g.t[0] + d * g.t[1])), g.tau)


def translation(dx_cells: int, dy_cells: int, tau: bool = False) -> Isometry:
    return Isometry("r0", (2 * dx_cells, 2 * dy_cells), tau)


def about(linear: str, point: tuple[int, int], tau: bool = False, glide=(0, 0)) -> Isometry:
    """Isometry with the given linear part fixing ``point`` (doubled), plus
    an optional glide translation in doubled coordinates."""
    (a, b), (c, d) = LINEAR[linear]
    px, py = point
    t = (px - (a * px + b * py) + glide[0], py - (c * px + d * py) + glide[1])
    return Isometry(linear, t, tau)


def rot90_about(point, tau=False):
    return about("r90", point, tau)


def rot180_about(point, tau=False):
    return about("r180", point, tau)


class TorusDesign:
    """Immutable n x n boolean interlacement grid on a torus.

    ``arr[i, j]`` is indexed warp-first: axis 0 is the column (warp) index
    and axis 1 the row (weft) index.  ``role`` is a semantic tag only and
    does not participate in equality.
    """

    __slots__ = ("arr", "role")

    def __init__(self, arr, role: str = "design"):
        a = np.asarray(arr, dtype=bool).copy()
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise PreconditionError(f"design grid must be square and non-empty, got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "arr", a)
        object.__setattr__(self, "role", role)

    def __setattr__(self, *a):
        raise AttributeError("TorusDesign is immutable")

    @property
    def n(self) -> int:
        return self.arr.shape[0]

    def bit(self, i: int, j: int) -> bool:
        return bool(self.arr[i % self.n, j % self.n])

    def __eq__(self, other):
        return (
            isinstance(other, TorusDesign)
            and self.n == other.n
            and bool(np.array_equal(self.arr, other.arr))
        )

    def __hash__(self):
        return hash((self.n, self.arr.tobytes()))

    def __repr__(self):
        return f"TorusDesign(n={self.n}, role={self.role!r})"

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rows(cls, rows_bottom_first, role="design"):
        """Build from row strings of '#'/'.' (or '1'/'0'), row j=0 first."""
        n = len(rows_bottom_first)
        a = np.zeros((n, n), dtype=bool)
        for j, row in enumerate(rows_bottom_first):
            if len(row) != n:
                raise DesignParseError(f"row {j} has length {len(row)}, expected {n}")
            for i, ch in enumerate(row):
                if ch in "#1":
                    a[i, j] = True
                elif ch not in ".0":
                    raise DesignParseError(f"bad character {ch!r} in row {j}")
        return cls(a, role)

    @classmethod
    def from_text(cls, text: str, role="design"):
        grid, _ = _parse_grid(text, allow_unknown=False)
        return cls(grid.astype(bool), role)

    # -- views --------------------------------------------------------

    def rows_bottom_first(self):
        return ["".join("#" if self.arr[i, j] else "." for i in range(self.n)) for j in range(self.n)]

    def to_text(self) -> str:
        rows = self.rows_bottom_first()
        return f"order: {self.n}\n" + "\n".join(reversed(rows)) + "\n"

    def complement(self):
        return TorusDesign(~self.arr, self.role)

    def translated(self, dx_cells: int, dy_cells: int):
        return TorusDesign(np.roll(self.arr, (dx_cells, dy_cells), axis=(0, 1)), self.role)

    def tiled(self, m: int):
        """Same design stored with period m*n."""
        return TorusDesign(np.tile(self.arr, (m, m)), self.role)


def _parse_grid(text: str, allow_unknown: bool):
    """Parse the text design format; returns (int8 grid, n).

    First line ``order: n``; then n lines of n characters, '#' dark,
    '.' pale ('?' undetermined when allow_unknown), top line is row n-1.
    """
    lines = text.splitlines()
    if not lines:
        raise DesignParseError("empty input", line=1)
    head = lines[0].strip()
    if not head.startswith("order:"):
        raise DesignParseError("expected header 'order: n'", line=1)
    try:
        n = int(head.split(":", 1)[1])
    except ValueError:
        raise DesignParseError(f"bad order {head!r}", line=1)
    if n < 1:
        raise DesignParseError("order must be >= 1", line=1)
    body = [ln for ln in lines[1:] if ln.strip() != ""]
    if len(body) != n:
        raise DesignParseError(f"expected {n} grid lines, got {len(body)}", line=len(lines))
    grid = np.zeros((n, n), dtype=np.int8)
    for k, ln in enumerate(body):
        j = n - 1 - k
        ln = ln.strip()
        if len(ln) != n:
            raise DesignParseError(f"expected {n} characters, got {len(ln)}", line=k + 2)
        for i, ch in enumerate(ln):
            if ch == "#":
                grid[i, j] = 1
            elif ch == ".":
                grid[i, j] = 0
            elif ch == "?" and allow_unknown:
                grid[i, j] = -1
            else:
                raise DesignParseError(f"bad character {ch!r}", line=k + 2)
    return grid, n


def plain_weave(n: int = 2) -> TorusDesign:
    """Plain weave at period n (n even): dark iff i+j is even."""
    i, j = np.indices((n, n))
    return TorusDesign((i + j) % 2 == 0)


def cell_maps(g: Isometry, n: int):
    """Index arrays (Ip, Jp) with g.(i,j) = (Ip[i,j], Jp[i,j]) on the torus."""
    i, j = np.indices((n, n))
    x = 2 * i + 1
    y = 2 * j + 1
    (a, b), (c, d) = LINEAR[g.linear]
    xp = a * x + b * y + g.t[0]
    yp = c * x + d * y + g.t[1]
    return ((xp - 1) // 2) % n, ((yp - 1) // 2) % n


def is_symmetry(d: TorusDesign, g: Isometry) -> bool:
    """Whether g is a symmetry of d under the colour rule
    D(g.c) = D(c) XOR tau XOR roleswap, translations taken mod the torus."""
    ip, jp = cell_maps(g, d.n)
    target = d.arr ^ g.flag
    return bool(np.array_equal(d.arr[ip, jp], target))


def _divisors(n: int):
    return [p for p in range(1, n + 1) if n % p == 0]


def order(d: TorusDesign) -> int:
    """Smallest p >= 1 with (p, 0) a plain translation symmetry."""
    for p in _divisors(d.n):
        if np.array_equal(np.roll(d.arr, -p, axis=0), d.arr):
            return p
    return d.n  # unreachable: p = n always holds


def _vertical_order(d: TorusDesign) -> int:
    for p in _divisors(d.n):
        if np.array_equal(np.roll(d.arr, -p, axis=1), d.arr):
            return p
    return d.n


def double(d: TorusDesign) -> TorusDesign:
    """Each cell replaced by a 2x2 block of its colour; period doubles."""
    return TorusDesign(np.repeat(np.repeat(d.arr, 2, axis=0), 2, axis=1), d.role)


def reverse_view(d: TorusDesign) -> TorusDesign:
    """The other side as viewed in a mirror: complement of d reflected
    about a vertical axis.  An involution."""
    return TorusDesign(~d.arr[::-1, :], d.role)


def canonical(d: TorusDesign) -> TorusDesign:
    """Translation-canonical representative: stored period reduced to the
    minimal square period, then the lexicographically least grid over all
    torus translations.  Equal outputs iff the inputs are translates."""
    ph = order(d)
    pv = _vertical_order(d)
    p = math.lcm(ph, pv)
    sub = d.arr[:p, :p]
    best = None
    best_arr = None
    for di in range(p):
        a = np.roll(sub, -di, axis=0)
        for dj in range(p):
            b = np.roll(a, -dj, axis=1)
            key = b.tobytes()
            if best is None or key < best:
                best = key
                best_arr = b
    return TorusDesign(best_arr, d.role)
