"""Symmetry-group detection, signatures, and species labels.

Detection scans the finite torus: all 8 linear parts x all cell
translations x both side flags, keeping the candidates that satisfy the
colour rule.  The translation matches for one linear part are found with
an FFT cross-correlation so that whole catalogues stay fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvariantError
from .grid import (
    IDENTITY,
    LINEAR,
    MIRRORS,
    Isometry,
    TorusDesign,
    cell_maps,
    compose,
    invert,
)

# ---------------------------------------------------------------------------
# integer lattice helpers (rank-2 sublattices of Z^2, doubled coordinates)


def lattice_basis(vectors):
    """Reduced basis (b1, b2) of the full-rank lattice generated by
    ``vectors`` (torus translations are always among them)."""
    a = None  # pivot row with nonzero x
    b = None  # row of the form (0, y)
    for v in vectors:
        vx, vy = int(v[0]), int(v[1])
        while vx:
            if a is None:
                a, vx, vy = (vx, vy), 0, 0
                break
            q = vx // a[0]
            vx, vy = vx - q * a[0], vy - q * a[1]
            if vx:
                a, (vx, vy) = (vx, vy), a
        if vy:
            b = (0, vy if b is None else math.gcd(b[1], vy))
    if a is None or b is None:
        raise InvariantError("lattice is not full rank")
    return _lagrange_reduce(a, b)


def _norm2(v):
    return v[0] * v[0] + v[1] * v[1]


def _lagrange_reduce(b1, b2):
    b1, b2 = tuple(b1), tuple(b2)
    while True:
        if _norm2(b2) < _norm2(b1):
            b1, b2 = b2, b1
        mu = round((b1[0] * b2[0] + b1[1] * b2[1]) / _norm2(b1))
        nb2 = (b2[0] - mu * b1[0], b2[1] - mu * b1[1])
        if _norm2(nb2) >= _norm2(b2):
            return b1, b2
        b2 = nb2


def lattice_contains(basis, v) -> bool:
    (a, b), (c, d) = basis
    det = a * d - b * c
    if det == 0:
        raise InvariantError("degenerate lattice basis")
    return (v[0] * d - v[1] * c) % det == 0 and (-v[0] * b + v[1] * a) % det == 0


def lattice_reduce_point(basis, p):
    """Canonical representative of p modulo the lattice."""
    (a, b), (c, d) = basis
    det = a * d - b * c
    alpha = math.floor((p[0] * d - p[1] * c) / det)
    beta = math.floor((-p[0] * b + p[1] * a) / det)
    return (p[0] - alpha * a - beta * c, p[1] - alpha * b - beta * d)


def shortest_vector(basis):
    """Canonical shortest lattice vector: minimal norm, preferring the
    representative with non-negative coordinates, then lexicographic."""
    b1, b2 = _lagrange_reduce(*basis)
    cands = [b1, b2, (b1[0] + b2[0], b1[1] + b2[1]), (b1[0] - b2[0], b1[1] - b2[1])]
    cands = [(s * x, s * y) for (x, y) in cands for s in (1, -1) if (x, y) != (0, 0)]
    m = min(_norm2(v) for v in cands)
    short = [v for v in cands if _norm2(v) == m]
    nn = [v for v in short if v[0] >= 0 and v[1] >= 0]
    return min(nn or short)


# ---------------------------------------------------------------------------
# detection


def _translation_matches(A, FA, target):
    """All cell shifts (ti, tj) with A[(c + t) mod n] == target[c] for all c."""
    n = A.shape[0]
    Y = target.astype(np.float64)
    cross = np.fft.irfft2(FA * np.conj(np.fft.rfft2(Y)), s=(n, n))
    mism = A.sum() + Y.sum() - 2.0 * cross
    return np.argwhere(np.abs(mism) < 0.5)


def detect_group(d: TorusDesign) -> "SymGroup":
    """Full symmetry group of d on its torus (all linear parts, all
    translations within one period, both side flags)."""
    n = d.n
    A = d.arr.astype(np.float64)
    FA = np.fft.rfft2(A)
    elements = []
    for name in LINEAR:
        g0 = Isometry(name, (0, 0), False)
        ip, jp = cell_maps(g0, n)
        B = np.empty((n, n), dtype=bool)
        B[ip, jp] = d.arr  # design pushed forward by the linear part
        rs = g0.roleswap
        for tau in (False, True):
            for ti, tj in _translation_matches(A, FA, B ^ (tau ^ rs)):
                elements.append(Isometry(name, (2 * int(ti), 2 * int(tj)), tau))
    elements.sort(key=Isometry.sort_key)
    return SymGroup(n, tuple(elements))


@dataclass(frozen=True)
class CentreMark:
    """Rotation centre in doubled coordinates; kind is 'quarter' or 'half'."""

    position: tuple[int, int]
    kind: str
    tau: bool


@dataclass(frozen=True)
class AxisRecord:
    """One reflective direction/side-flag class of the group."""

    direction: str
    tau: bool
    mirror: bool                   # a zero-glide axis exists
    min_glide: int | None          # least positive glide, axis quanta
    positions: tuple[int, ...]     # axis-position classes mod 2

    def __iter__(self):  # convenience for tests
        return iter((self.direction, self.tau, self.mirror))


def _axis_position_and_glide(g: Isometry):
    """(axis position parameter, glide) for a reflective element.

    Positions are comparable within one direction and live mod n (cells
    doubled for mv/mh, the y-x / y+x intercept for diagonals).  Glides are
    in axis quanta: one cell side for strand-parallel axes, half a cell
    diagonal for diagonal axes.
    """
    tx, ty = g.t
    if g.linear == "mv":
        return tx // 2, ty // 2
    if g.linear == "mh":
        return ty // 2, tx // 2
    if g.linear == "md":
        return (ty - tx) // 2, (tx + ty) // 2
    if g.linear == "ma":
        return (tx + ty) // 2, (tx - ty) // 2
    raise InvariantError("not a reflective element")


class SymGroup:
    """Detected symmetry group of a design on its n x n torus.

    ``elements`` is the complete list of torus-reduced isometries; the
    side-preserving subgroup is the subset with tau = 0.
    """

    def __init__(self, n: int, elements: tuple[Isometry, ...]):
        self.n = n
        self.elements = elements
        self._keys = {(g.linear, g.t, g.tau) for g in elements}

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g: Isometry):
        g = g.canon(self.n)
        return (g.linear, g.t, g.tau) in self._keys

    def __iter__(self):
        return iter(self.elements)

    @cached_property
    def h1_elements(self) -> tuple[Isometry, ...]:
        return tuple(g for g in self.elements if not g.tau)

    @cached_property
    def translations(self) -> tuple[Isometry, ...]:
        return tuple(g for g in self.elements if g.linear == "r0")

    @cached_property
    def t0_basis(self):
        """Basis of the side-preserving translation lattice (doubled)."""
        vs = [g.t for g in self.translations if not g.tau]
        return lattice_basis(vs + [(2 * self.n, 0), (0, 2 * self.n)])

    @cached_property
    def tfull_basis(self):
        """Basis of the full translation lattice, either side flag."""
        vs = [g.t for g in self.translations]
        return lattice_basis(vs + [(2 * self.n, 0), (0, 2 * self.n)])

    @cached_property
    def elements_mod_translations(self) -> tuple[Isometry, ...]:
        """One representative per coset of the side-preserving lattice."""
        seen = {}
        for g in self.elements:
            rep = lattice_reduce_point(self.t0_basis, g.t)
            seen.setdefault((g.linear, g.tau, rep), Isometry(g.linear, rep, g.tau))
        return tuple(sorted(seen.values(), key=Isometry.sort_key))

    def verify_closed(self) -> bool:
        """Group axioms on the torus; used by tests, not hot paths."""
        for g in self.elements:
            if invert(g).canon(self.n) not in self:
                return False
        for g1 in self.elements:
            for g2 in self.elements:
                if compose(g1, g2).canon(self.n) not in self:
                    return False
        return True

    def fixes_point(self, g: Isometry, p) -> bool:
        """Whether some torus lift of g fixes the doubled point p."""
        two_n = 2 * self.n
        x, y = g.apply(*p)
        return (x - p[0]) % two_n == 0 and (y - p[1]) % two_n == 0

    # -- rotation centres ----------------------------------------------

    def _centres(self, linear: str):
        out = {}
        two_n = 2 * self.n
        (a, b), (c, d) = LINEAR[linear]
        ia, ib, ic, id_ = 1 - a, -b, -c, 1 - d  # I - L
        det = ia * id_ - ib * ic
        for g in self.elements:
            if g.linear != linear:
                continue
            tx, ty = g.t
            px, py = id_ * tx - ib * ty, -ic * tx + ia * ty
            if px % det or py % det:
                continue
            base = ((px // det) % two_n, (py // det) % two_n)
            for kx in range(0, two_n, self.n):
                for ky in range(0, two_n, self.n):
                    cx, cy = (base[0] + kx) % two_n, (base[1] + ky) % two_n
                    if (ia * cx + ib * cy - tx) % two_n == 0 and (
                        ic * cx + id_ * cy - ty
                    ) % two_n == 0:
                        prev = out.get((cx, cy))
                        if prev is not None and prev != g.tau:
                            raise InvariantError("conflicting side flags at one centre")
                        out[(cx, cy)] = g.tau
        return sorted(out.items())

    @cached_property
    def quarter_centres(self) -> tuple[CentreMark, ...]:
        return tuple(CentreMark(p, "quarter", t) for p, t in self._centres("r90"))

    @cached_property
    def half_centres(self) -> tuple[CentreMark, ...]:
        return tuple(CentreMark(p, "half", t) for p, t in self._centres("r180"))

    # -- axes ------------------------------------------------------------

    @cached_property
    def axes(self) -> tuple[AxisRecord, ...]:
        n = self.n
        recs = []
        for direction in MIRRORS:
            for tau in (False, True):
                elems = [g for g in self.elements if g.linear == direction and g.tau == tau]
                if not elems:
                    continue
                glides, positions, mirror = [], set(), False
                for g in elems:
                    pos, glide = _axis_position_and_glide(g)
                    if glide % n == 0:
                        mirror = True
                        positions.add(pos % 2)
                        if n % 2:
                            positions.add((pos + n) % 2)
                    else:
                        glides.append(min(glide % n, n - glide % n))
                recs.append(
                    AxisRecord(direction, tau, mirror, min(glides) if glides else None,
                               tuple(sorted(positions)))
                )
        return tuple(recs)

    def has_reflective(self, tau=None) -> bool:
        return any(
            g.linear in MIRRORS and (tau is None or g.tau == tau) for g in self.elements
        )

    # -- strand action ----------------------------------------------------

    def strand_perm(self, g: Isometry):
        """Permutation of the 2n strand labels (warps 0..n-1 then wefts)."""
        n = self.n
        perm = np.empty(2 * n, dtype=np.int64)
        for i in range(n):
            a1, a2 = g.map_cell(i, 0), g.map_cell(i, 1)
            perm[i] = a1[0] % n if a1[0] % n == a2[0] % n else n + a1[1] % n
        for j in range(n):
            b1, b2 = g.map_cell(0, j), g.map_cell(1, j)
            perm[n + j] = n + b1[1] % n if b1[1] % n == b2[1] % n else b1[0] % n
        return perm

    def strand_orbits(self) -> int:
        n = self.n
        parent = list(range(2 * n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in self.elements:
            perm = self.strand_perm(g)
            for s in range(2 * n):
                a, b = find(s), find(int(perm[s]))
                if a != b:
                    parent[a] = b
        return len({find(s) for s in range(2 * n)})


# ---------------------------------------------------------------------------
# crystal classification (square-lattice wallpaper types only)


def _crystal_type(elements, n: int) -> str:
    if not elements:
        return "p1"
    group = SymGroup(n, tuple(g.canon(n) for g in elements))
    has_q = any(g.linear == "r90" for g in elements)
    has_h = any(g.linear == "r180" for g in elements)
    reflective = [g for g in elements if g.linear in MIRRORS]
    mirrors = [g for g in reflective if _axis_position_and_glide(g)[1] % n == 0]
    if has_q:
        if not reflective:
            return "p4"
        qcs = [c.position for c in group.quarter_centres]
        for m in mirrors:
            if any(group.fixes_point(m, p) for p in qcs):
                return "p4m"
        return "p4g"
    if has_h:
        if not reflective:
            return "p2"
        mirror_dirs = {g.linear for g in mirrors}
        if not mirror_dirs:
            return "pgg"
        if len(mirror_dirs) == 1:
            return "pmg"
        hcs = [c.position for c in group.half_centres]
        for p in hcs:
            if not any(group.fixes_point(m, p) for m in mirrors):
                return "cmm"
        return "pmm"
    if reflective:
        if not mirrors:
            return "pg"
        mirror_axes = {(g.linear, _axis_position_and_glide(g)[0] % n) for g in mirrors}
        for g in reflective:
            pos, glide = _axis_position_and_glide(g)
            if glide % n and (g.linear, pos % n) not in mirror_axes:
                return "cm"
        return "pm"
    return "p1"


def crystal_type_g1(group: SymGroup) -> str:
    seen = {(g.linear, g.t) for g in group.elements}
    return _crystal_type([Isometry(lin, t, False) for lin, t in seen], group.n)


def crystal_type_h1(group: SymGroup) -> str:
    return _crystal_type(list(group.h1_elements), group.n)


# ---------------------------------------------------------------------------
# signature and species


@dataclass(frozen=True)
class QuarterLattices:
    """The two interleaved quarter-turn centre lattices ('chain mail')."""

    mn: tuple[int, int]             # primitive lattice vector, cell units
    level: int
    corner_anchor: tuple[int, int]  # doubled coordinates
    corner_tau: bool
    centre_anchor: tuple[int, int]
    centre_tau: bool


@dataclass(frozen=True)
class Signature:
    n: int
    crystal_g1: str
    crystal_h1: str
    quarter: QuarterLattices | None
    half_centres: tuple[CentreMark, ...]
    axes: tuple[AxisRecord, ...]

    @property
    def level(self):
        return self.quarter.level if self.quarter else None

    def to_json(self):
        out = {
            "n": self.n,
            "crystal_g1": self.crystal_g1,
            "crystal_h1": self.crystal_h1,
            "level": self.level,
            "half_centres": [
                {"position": list(c.position), "tau": int(c.tau)} for c in self.half_centres
            ],
            "axes": [
                {
                    "direction": a.direction,
                    "tau": int(a.tau),
                    "mirror": a.mirror,
                    "min_glide": a.min_glide,
                    "positions": list(a.positions),
                }
                for a in self.axes
            ],
            "quarter": None,
        }
        if self.quarter:
            q = self.quarter
            out["quarter"] = {
                "mn": list(q.mn),
                "level": q.level,
                "corner": {"anchor": list(q.corner_anchor), "tau": int(q.corner_tau)},
                "centre": {"anchor": list(q.centre_anchor), "tau": int(q.centre_tau)},
            }
        return out


def level_of(mn) -> int:
    m, n = mn
    if (m % 2) and (n % 2):
        return 2
    if (m % 2) != (n % 2):
        return 1
    return 3 if (m + n) % 4 == 2 else 4


def signature(group: SymGroup) -> Signature:
    quarter = None
    qcs = group.quarter_centres
    if qcs:
        basis = group.tfull_basis
        cosets = {}
        for c in qcs:
            rep = lattice_reduce_point(basis, c.position)
            prev = cosets.get(rep)
            if prev is not None and prev != c.tau:
                raise InvariantError("inconsistent side flag within a centre lattice")
            cosets[rep] = c.tau
        if len(cosets) != 2:
            raise InvariantError(
                f"quarter-turn centres form {len(cosets)} lattices, expected a chain-mail pair"
            )
        mn2 = shortest_vector(basis)
        if mn2[0] % 2 or mn2[1] % 2:
            raise InvariantError("translation lattice not in whole cell units")
        mn = (mn2[0] // 2, mn2[1] // 2)
        (p1, t1), (p2, t2) = sorted(cosets.items())
        off = (p2[0] - p1[0], p2[1] - p1[1])
        half_diag = (mn2[0] // 2 - mn2[1] // 2, mn2[0] // 2 + mn2[1] // 2)
        if not (
            lattice_contains(basis, (off[0] - half_diag[0], off[1] - half_diag[1]))
            or lattice_contains(basis, (off[0] + half_diag[0], off[1] + half_diag[1]))
            or lattice_contains(basis, (off[0] - half_diag[1], off[1] + half_diag[0]))
            or lattice_contains(basis, (off[0] + half_diag[1], off[1] - half_diag[0]))
        ):
            raise InvariantError("quarter-turn centre lattices are not in chain-mail relation")
        quarter = QuarterLattices(mn, level_of(mn), p1, t1, p2, t2)
    return Signature(
        n=group.n,
        crystal_g1=crystal_type_g1(group),
        crystal_h1=crystal_type_h1(group),
        quarter=quarter,
        half_centres=_half_coset_marks(group),
        axes=group.axes,
    )


def _half_coset_marks(group: SymGroup):
    hcs = group.half_centres
    if not hcs:
        return ()
    basis = group.tfull_basis
    cosets = {}
    for c in hcs:
        cosets.setdefault(lattice_reduce_point(basis, c.position), c.tau)
    return tuple(CentreMark(p, "half", t) for p, t in sorted(cosets.items()))


@dataclass(frozen=True)
class SpeciesLabel:
    name: str
    level: int | None = None
    signature: Signature | None = field(default=None, compare=False, repr=False)

    def __str__(self):
        return self.name


def species(sig: Signature) -> SpeciesLabel:
    """Species label from a signature.

    Quarter-turn-only groups follow the two-lattice side-flag table: both
    plain -> 33_level, both reversing -> 35_level, mixed at level 4 -> 37.
    Quarter-turns with side-reversing axes get the coarse 34/36/38/39
    family label; quarter-turns with plain axes are the over-symmetric
    exceptional designs.  Axis-bearing groups without quarter-turns keep a
    coarse crystal-type label.
    """
    q = sig.quarter
    has_axes = bool(sig.axes)
    has_plain_axes = any(not a.tau for a in sig.axes)
    if q is not None:
        if not has_axes:
            if q.corner_tau == q.centre_tau:
                base = "35" if q.corner_tau else "33"
                return SpeciesLabel(f"{base}_{q.level}", q.level, sig)
            if q.level == 4:
                return SpeciesLabel("37", 4, sig)
            return SpeciesLabel(f"other(qt-mixed-level-{q.level})", q.level, sig)
        if has_plain_axes:
            return SpeciesLabel(f"other({sig.crystal_g1})", q.level, sig)
        return SpeciesLabel("34/36/38/39", q.level, sig)
    if has_axes:
        return SpeciesLabel(f"axis({sig.crystal_g1}/{sig.crystal_h1})", None, sig)
    return SpeciesLabel(f"other({sig.crystal_g1})", None, sig)


def species_of(d: TorusDesign) -> SpeciesLabel:
    return species(signature(detect_group(d)))


# ---------------------------------------------------------------------------
# design-level predicates


def is_isonemal(d: TorusDesign) -> bool:
    """Whether the symmetry group is transitive on the 2n strands."""
    return detect_group(d).strand_orbits() == 1


def genus_v_rows(d: TorusDesign) -> bool:
    """Rows and columns partition into aligned pairs whose dark counts
    alternate 3n/4, 3n/4, n/4, n/4."""
    n = d.n
    if n % 4:
        return False
    hi, lo = 3 * n // 4, n // 4

    def ok(counts):
        return any(
            all(counts[j] == (hi if (j - o) % 4 in (0, 1) else lo) for j in range(n))
            for o in range(4)
        )

    return ok(d.arr.sum(axis=0)) and ok(d.arr.sum(axis=1))


def has_adjacent_translation(d: TorusDesign) -> bool:
    """Whether some symmetry is a strand-to-adjacent-strand translation
    (x = +-1 or y = +-1 in cells, either side flag)."""
    n = d.n
    shifts = set()
    for w in range(n):
        for v in (1 % n, (n - 1) % n):
            shifts.add((v, w))
            shifts.add((w, v))
    for dx, dy in shifts:
        rolled = np.roll(d.arr, (-dx, -dy), axis=(0, 1))
        if np.array_equal(rolled, d.arr) or np.array_equal(rolled, ~d.arr):
            return True
    return False


# ---------------------------------------------------------------------------
# group construction from generators (used by the catalogue and tests)


def group_from_generators(generators, n: int) -> SymGroup:
    """Closure of ``generators`` on the n-torus.

    Raises if the closure forces some isometry to carry both side flags,
    which happens when the period is incompatible with the generated
    translation lattice.
    """
    gens = []
    for g in generators:
        gens.append(g.canon(n))
        gens.append(invert(g).canon(n))
    elems = {(IDENTITY.linear, IDENTITY.t): IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for g1 in frontier:
            for g2 in gens:
                h = compose(g1, g2).canon(n)
                k = (h.linear, h.t)
                old = elems.get(k)
                if old is None:
                    elems[k] = h
                    nxt.append(h)
                elif old.tau != h.tau:
                    raise InvariantError(
                        "group closure assigns both side flags to one isometry "
                        "(period incompatible with the generated lattice)"
                    )
        frontier = nxt
    return SymGroup(n, tuple(sorted(elems.values(), key=Isometry.sort_key)))
