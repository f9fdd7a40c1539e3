"""Woven cubes from lattice units.

The net is a cross of six oblique square faces, each a lattice unit of
the design's symmetry lattice with side vector (M, N) in cells, anchored
at a quarter-turn centre.  All charts share the plane's grid orientation;
the twelve edge gluings are plane isometries (rotations, side flag 0)
pinned down by matching cube vertices.

3D positions are kept exact by scaling the cube edge to K = 2(M^2+N^2):
a plane offset s (doubled coordinates) inside the face maps to
u3 * (M s_x + N s_y) + v3 * (-N s_x + M s_y), which is integral.

A cube cell is a plane cell owned by the face containing its centre;
cells split by a fold keep one id, and a centre landing exactly on an
edge goes to the lower face id.  Strand tracing walks cell by cell,
hopping charts through the gluings; every cube cell is visited exactly
twice, in perpendicular directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvariantError, PreconditionError
from .grid import LINEAR, Isometry, TorusDesign, is_symmetry
from .striping import Striping
from .symmetry import detect_group

# face order: front, north (top), back, south (bottom), west, east
NET_GRID = {0: (0, 0), 1: (0, 1), 2: (0, 2), 3: (0, -1), 4: (-1, 0), 5: (1, 0)}
FACE_NAMES = ("F", "N", "B", "S", "W", "E")
_FRAMES = {
    0: ((0, 0, 0), (1, 0, 0), (0, 0, 1)),
    1: ((0, 0, 1), (1, 0, 0), (0, 1, 0)),
    2: ((0, 1, 1), (1, 0, 0), (0, 0, -1)),
    3: ((0, 1, 0), (1, 0, 0), (0, -1, 0)),
    4: ((0, 1, 0), (0, -1, 0), (0, 0, 1)),
    5: ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
}
# side s joins unit-square corners CORNER_OFFSETS[s] -> CORNER_OFFSETS[s+1]
CORNER_OFFSETS = ((0, 0), (1, 0), (1, 1), (0, 1))

_ROTS = ("r0", "r90", "r180", "r270")


@dataclass(frozen=True)
class Gluing:
    face: int
    side: int
    partner_face: int
    partner_side: int
    transform: Isometry  # chart transition, this face's chart -> partner's


@dataclass
class StrandPath:
    index: int
    visits: list  # (cell id, axis key) in walk order
    colour: bool | None

    @property
    def length(self):
        return len(self.visits)

    @property
    def cells(self):
        return [v[0] for v in self.visits]

    def self_crossings(self):
        from collections import Counter

        return sum(1 for _, c in Counter(self.cells).items() if c == 2)


class CubeNet:
    """Six-face cross net of a design's lattice units."""

    def __init__(self, design: TorusDesign, mn, anchor_cells, striping: Striping | None = None):
        self.design = design
        self.m, self.nn = int(mn[0]), int(mn[1])
        self.anchor = (2 * int(anchor_cells[0]), 2 * int(anchor_cells[1]))
        self.striping = striping
        self.K = 2 * (self.m * self.m + self.nn * self.nn)
        self.U = (2 * self.m, 2 * self.nn)
        self.V = (-2 * self.nn, 2 * self.m)
        self._face_anchor = {}
        for f, (gx, gy) in NET_GRID.items():
            self._face_anchor[f] = (
                self.anchor[0] + gx * self.U[0] + gy * self.V[0],
                self.anchor[1] + gx * self.U[1] + gy * self.V[1],
            )
        self.gluings: dict[tuple[int, int], Gluing] = {}
        self.cells_map: dict[tuple[int, tuple[int, int]], int] = {}
        self.id_info: list = []  # id -> (face, cell, pos3d)
        self.pos3d_to_id: dict = {}
        self._build_gluings()
        self._validate_design()
        if striping is not None:
            self._validate_striping()
        self._build_cells()

    # -- geometry -------------------------------------------------------

    def face_coords(self, face, q):
        """(sU, sV) of a doubled plane point in the face chart; the face
        square is 0 <= sU, sV <= 2K."""
        a = self._face_anchor[face]
        s = (q[0] - a[0], q[1] - a[1])
        return (self.U[0] * s[0] + self.U[1] * s[1], self.V[0] * s[0] + self.V[1] * s[1])

    def map3d(self, face, q):
        a = self._face_anchor[face]
        sx, sy = q[0] - a[0], q[1] - a[1]
        cu = self.m * sx + self.nn * sy
        cv = -self.nn * sx + self.m * sy
        corner, u3, v3 = _FRAMES[face]
        return tuple(
            self.K * corner[k] + cu * u3[k] + cv * v3[k] for k in range(3)
        )

    def lin3d(self, face, v):
        """Image of a doubled plane vector under the face chart's linear part."""
        cu = self.m * v[0] + self.nn * v[1]
        cv = -self.nn * v[0] + self.m * v[1]
        _, u3, v3 = _FRAMES[face]
        return tuple(cu * u3[k] + cv * v3[k] for k in range(3))

    def _net_corner_plane(self, face, dx, dy):
        a = self._face_anchor[face]
        return (a[0] + dx * self.U[0] + dy * self.V[0], a[1] + dx * self.U[1] + dy * self.V[1])

    # -- construction -----------------------------------------------------

    def _build_gluings(self):
        half_edges = {}
        for f in range(6):
            for s in range(4):
                d1, d2 = CORNER_OFFSETS[s], CORNER_OFFSETS[(s + 1) % 4]
                p1 = self._net_corner_plane(f, *d1)
                p2 = self._net_corner_plane(f, *d2)
                v1, v2 = self.map3d(f, p1), self.map3d(f, p2)
                half_edges[(f, s)] = (p1, p2, v1, v2)
        by_edge = {}
        for key, (_, _, v1, v2) in half_edges.items():
            by_edge.setdefault(frozenset((v1, v2)), []).append(key)
        for edge, keys in by_edge.items():
            if len(keys) != 2:
                raise InvariantError(f"cube edge shared by {len(keys)} half-edges")
        for edge, ((fa, sa), (fb, sb)) in by_edge.items():
            pa1, pa2, va1, va2 = half_edges[(fa, sa)]
            pb1, pb2, vb1, vb2 = half_edges[(fb, sb)]
            # match endpoints by cube vertex
            qa1 = pb1 if vb1 == va1 else pb2
            qa2 = pb2 if vb2 == va2 else pb1
            if (vb1 if vb1 == va1 else vb2) != va1 or (vb2 if vb2 == va2 else vb1) != va2:
                raise InvariantError("half-edge vertices do not match")
            t_ab = self._rotation_through(pa1, pa2, qa1, qa2)
            t_ba = self._rotation_through(qa1, qa2, pa1, pa2)
            self.gluings[(fa, sa)] = Gluing(fa, sa, fb, sb, t_ab)
            self.gluings[(fb, sb)] = Gluing(fb, sb, fa, sa, t_ba)
        if len(self.gluings) != 24:
            raise InvariantError("expected 24 directed gluings")

    @staticmethod
    def _rotation_through(p1, p2, q1, q2):
        """Unique orientation-preserving isometry with p1 -> q1, p2 -> q2."""
        dp = (p2[0] - p1[0], p2[1] - p1[1])
        dq = (q2[0] - q1[0], q2[1] - q1[1])
        for name in _ROTS:
            (a, b), (c, d) = LINEAR[name]
            if (a * dp[0] + b * dp[1], c * dp[0] + d * dp[1]) == dq:
                t = (q1[0] - (a * p1[0] + b * p1[1]), q1[1] - (c * p1[0] + d * p1[1]))
                return Isometry(name, t, False)
        raise InvariantError("no rotation matches the glued edge")

    def _validate_design(self):
        d = self.design
        group = detect_group(d)
        if group.strand_orbits() != 1:
            raise PreconditionError("design is not isonemal")
        for vec in (self.U, self.V):
            if not (
                Isometry("r0", vec, False).canon(d.n) in group
                or Isometry("r0", vec, True).canon(d.n) in group
            ):
                raise PreconditionError(
                    f"basis vector {vec} (doubled) is not a translation of the design"
                )
        if not any(
            c.position == (self.anchor[0] % (2 * d.n), self.anchor[1] % (2 * d.n))
            for c in group.quarter_centres
        ):
            raise PreconditionError("anchor is not a quarter-turn centre of the design")
        for (f, s), gl in sorted(self.gluings.items()):
            g = gl.transform
            if g.linear == "r0" and g.t == (0, 0):
                continue
            if not is_symmetry(d, g.canon(d.n)):
                if g.linear in ("r90", "r270"):
                    raise PreconditionError(
                        "net corner carries a side-reversing quarter-turn: the weave "
                        "cannot continue across the glued edge "
                        f"(face {FACE_NAMES[f]}, side {s})"
                    )
                raise PreconditionError(
                    f"gluing at face {FACE_NAMES[f]} side {s} is incompatible with the design"
                )

    def _validate_striping(self):
        s = self.striping
        if s.kind != "thick":
            raise PreconditionError("cube colouring expects a thick striping")
        if self.design.n % 4:
            raise PreconditionError("striping needs a period divisible by 4")
        corners = set()
        for f, (gx, gy) in NET_GRID.items():
            for dx, dy in ((0, 0), (1, 0), (1, 1), (0, 1)):
                corners.add(self._net_corner_plane(f, dx, dy))
        for (cx, cy) in corners:
            i0, j0 = cx // 2, cy // 2
            cols = {
                s.warp_colour((i0 - 1) % self.design.n),
                s.warp_colour(i0 % self.design.n),
                s.weft_colour((j0 - 1) % self.design.n),
                s.weft_colour(j0 % self.design.n),
            }
            if len(cols) != 1:
                raise PreconditionError(
                    "net corner sits at an irredundant block centre: the corner "
                    "block would show both colours"
                )

    def _build_cells(self):
        K2 = 2 * self.K
        for f in range(6):
            corners = [self._net_corner_plane(f, dx, dy) for dx, dy in
                       ((0, 0), (1, 0), (1, 1), (0, 1))]
            xs = [p[0] for p in corners]
            ys = [p[1] for p in corners]
            for i in range(min(xs) // 2 - 1, max(xs) // 2 + 1):
                for j in range(min(ys) // 2 - 1, max(ys) // 2 + 1):
                    q = (2 * i + 1, 2 * j + 1)
                    su, sv = self.face_coords(f, q)
                    if not (0 <= su <= K2 and 0 <= sv <= K2):
                        continue
                    on_edge = self._boundary_side(su, sv)
                    if on_edge is not None:
                        partner = self.gluings[(f, on_edge)].partner_face
                        if min(f, partner) != f:
                            continue
                    if 0 < su < K2 and 0 < sv < K2 or on_edge is not None:
                        cid = len(self.id_info)
                        self.cells_map[(f, (i, j))] = cid
                        pos = self.map3d(f, q)
                        self.id_info.append((f, (i, j), pos))
                        if pos in self.pos3d_to_id:
                            raise InvariantError("duplicate 3D cell position")
                        self.pos3d_to_id[pos] = cid
        expect = 6 * (self.m * self.m + self.nn * self.nn)
        if len(self.id_info) != expect:
            raise InvariantError(
                f"cell quotient has {len(self.id_info)} cells, expected {expect}"
            )

    def _boundary_side(self, su, sv):
        K2 = 2 * self.K
        if sv == 0 and 0 < su < K2:
            return 0
        if su == K2 and 0 < sv < K2:
            return 1
        if sv == K2 and 0 < su < K2:
            return 2
        if su == 0 and 0 < sv < K2:
            return 3
        if (su in (0, K2)) and (sv in (0, K2)):
            raise InvariantError("cell centre at a net corner")
        return None

    def cell_count(self):
        return len(self.id_info)

    # -- stepping ---------------------------------------------------------

    def _step(self, face, cell, dcell):
        """Advance one cell in direction dcell; returns (face, cell, dcell)
        with the cell expressed in its owner chart."""
        q = (2 * cell[0] + 1, 2 * cell[1] + 1)
        q2 = (q[0] + 2 * dcell[0], q[1] + 2 * dcell[1])
        t_low = Fraction(0)
        for _ in range(8):
            su2, sv2 = self.face_coords(face, q2)
            K2 = 2 * self.K
            inside = 0 < su2 < K2 and 0 < sv2 < K2
            side_tie = None
            if not inside and 0 <= su2 <= K2 and 0 <= sv2 <= K2:
                side_tie = self._boundary_side(su2, sv2)
                partner = self.gluings[(face, side_tie)].partner_face
                if min(face, partner) == face:
                    # endpoint owned here despite sitting on the edge
                    inside = True
                    side_tie = None
            if inside:
                return face, ((q2[0] - 1) // 2, (q2[1] - 1) // 2), dcell
            su1, sv1 = self.face_coords(face, q)
            crossings = []
            for side, (coord1, coord2, bound) in (
                (0, (sv1, sv2, 0)),
                (1, (su1, su2, K2)),
                (2, (sv1, sv2, K2)),
                (3, (su1, su2, 0)),
            ):
                dcoord = coord2 - coord1
                if dcoord == 0:
                    continue
                # outward exactly when moving past this bound; the entry
                # edge of the current chart is automatically excluded
                outward = dcoord > 0 if bound == K2 else dcoord < 0
                if not outward:
                    continue
                t = Fraction(bound - coord1, dcoord)
                if t_low <= t <= 1:
                    crossings.append((t, side))
            if not crossings:
                raise InvariantError("step left the face without crossing an edge")
            t_star, side = min(crossings)
            gl = self.gluings[(face, side)]
            T = gl.transform
            q = T.apply(*q)
            q2 = T.apply(*q2)
            (a, b), (c, d) = LINEAR[T.linear]
            dcell = (a * dcell[0] + b * dcell[1], c * dcell[0] + d * dcell[1])
            face = gl.partner_face
            t_low = t_star
        raise InvariantError("stepping did not settle into a face")

    def _axis_key(self, face, dcell):
        d3 = self.lin3d(face, (2 * dcell[0], 2 * dcell[1]))
        return max(d3, tuple(-x for x in d3))

    def _visit_colour(self, face, cell, dcell):
        if self.striping is None:
            return None
        n = self.design.n
        if dcell[0] == 0:
            return self.striping.warp_colour(cell[0] % n)
        return self.striping.weft_colour(cell[1] % n)

    def trace_strands(self) -> list[StrandPath]:
        """Walk every strand to closure; validates the double covering and,
        when a striping is attached, per-strand colour consistency."""
        visited = set()
        strands = []
        for start_id in range(len(self.id_info)):
            face0, cell0, _ = self.id_info[start_id]
            for d0 in ((0, 1), (1, 0)):
                key0 = (start_id, self._axis_key(face0, d0))
                if key0 in visited:
                    continue
                visits = []
                colour = None
                state = (face0, cell0, d0)
                start_state = state
                while True:
                    face, cell, dcell = state
                    cid = self.cells_map[(face, cell)]
                    vkey = (cid, self._axis_key(face, dcell))
                    if vkey in visited and visits:
                        raise InvariantError("strand revisited a cell visit")
                    visited.add(vkey)
                    visits.append(vkey)
                    c = self._visit_colour(face, cell, dcell)
                    if c is not None:
                        if colour is None:
                            colour = c
                        elif colour != c:
                            raise InvariantError(
                                "strand changes stripe colour across a fold "
                                "(striping misaligned with the net)"
                            )
                    state = self._step(face, cell, dcell)
                    if state == start_state:
                        break
                strands.append(StrandPath(len(strands), visits, colour))
        total = sum(s.length for s in strands)
        if total != 2 * self.cell_count():
            raise InvariantError("strand visits do not double-cover the cells")
        return strands

    # -- rotations ----------------------------------------------------------

    @staticmethod
    def rotation_matrices():
        """The 24 integer rotation matrices of the cube."""
        import itertools

        mats = []
        for perm in itertools.permutations(range(3)):
            for signs in itertools.product((1, -1), repeat=3):
                m = np.zeros((3, 3), dtype=int)
                for r, c in enumerate(perm):
                    m[r, c] = signs[r]
                if round(np.linalg.det(m)) == 1:
                    mats.append(m)
        return mats

    def rotation_group(self):
        """Cell permutations of the 24 rotations; raises when a rotation
        fails to map cube cells onto cube cells (invalid net)."""
        C = self.K // 2
        perms = []
        for m in self.rotation_matrices():
            perm = []
            for cid, (_, _, pos) in enumerate(self.id_info):
                v = np.array(pos) - C
                w = tuple(int(x) for x in (m @ v) + C)
                if w not in self.pos3d_to_id:
                    raise InvariantError("rotation does not preserve the cell grid")
                perm.append(self.pos3d_to_id[w])
            perms.append((m, perm))
        return perms

    def strand_rotation_action(self, strands, perms):
        """Strand permutation induced by each rotation.

        Strands are matched by their cell sets; directions at cells bent
        exactly at a fold are chart-dependent, cell sets are not.
        """
        sets = {frozenset(s.cells): s.index for s in strands}
        if len(sets) != len(strands):
            raise InvariantError("two strands share one cell set")
        actions = []
        for m, perm in perms:
            mapping = {}
            for s in strands:
                img = frozenset(perm[c] for c in set(s.cells))
                target = sets.get(img)
                if target is None:
                    raise InvariantError("rotation broke the strand structure")
                mapping[s.index] = target
            actions.append(mapping)
        return actions

    def rotations_transitive_on_strands(self) -> bool:
        strands = self.trace_strands()
        perms = self.rotation_group()
        actions = self.strand_rotation_action(strands, perms)
        reach = {0}
        frontier = [0]
        while frontier:
            s = frontier.pop()
            for act in actions:
                t = act[s]
                if t not in reach:
                    reach.add(t)
                    frontier.append(t)
        return len(reach) == len(strands)

    # -- colour symmetry ------------------------------------------------------

    def visible_colours(self):
        if self.striping is None:
            raise PreconditionError("no striping attached")
        n = self.design.n
        out = []
        for face, (i, j), _ in self.id_info:
            if self.design.arr[i % n, j % n]:
                out.append(self.striping.warp_colour(i % n))
            else:
                out.append(self.striping.weft_colour(j % n))
        return np.array(out, dtype=bool)


def rotation_type(m) -> str:
    tr = int(np.trace(m))
    if tr == 3:
        return "identity"
    if tr == 1:
        return "face-quarter"
    if tr == 0:
        return "vertex-third"
    # trace -1: face-half when the +1 axis is a coordinate axis
    for k in range(3):
        e = np.zeros(3, dtype=int)
        e[k] = 1
        if np.array_equal(m @ e, e):
            return "face-half"
    return "edge-half"


def build_net(design: TorusDesign, mn, anchor_cells, striping: Striping | None = None) -> CubeNet:
    return CubeNet(design, mn, anchor_cells, striping)


def cube_colour_report(net: CubeNet):
    """Per-rotation colour behaviour: 'preserve', 'swap', or 'broken'."""
    colours = net.visible_colours()
    C = net.K // 2
    report = []
    for m, perm in net.rotation_group():
        image = np.empty_like(colours)
        for cid, tgt in enumerate(perm):
            image[tgt] = colours[cid]
        if np.array_equal(image, colours):
            verdict = "preserve"
        elif np.array_equal(image, ~colours):
            verdict = "swap"
        else:
            verdict = "broken"
        report.append((rotation_type(m), verdict))
    return report


def is_perfect_cube(net: CubeNet, striping: Striping | None = None) -> bool:
    """Every rotation of the cube preserves or swaps the visible colours,
    with the expected behaviour per rotation class: face-centre
    quarter-turns and edge half-turns swap, vertex third-turns, face
    half-turns, and the identity preserve."""
    if striping is not None and striping != net.striping:
        net = CubeNet(net.design, (net.m, net.nn), (net.anchor[0] // 2, net.anchor[1] // 2), striping)
    from .striping import is_perfect as striping_is_perfect

    if net.striping is None:
        raise PreconditionError("no striping attached")
    if not striping_is_perfect(net.design, net.striping):
        raise PreconditionError("striping is not a perfect colouring of the planar fabric")
    expected = {
        "identity": "preserve",
        "face-quarter": "swap",
        "face-half": "preserve",
        "edge-half": "swap",
        "vertex-third": "preserve",
    }
    return all(verdict == expected[kind] for kind, verdict in cube_colour_report(net))


def cube_report(net: CubeNet) -> dict:
    strands = net.trace_strands()
    perms = net.rotation_group()
    out = {
        "basis": [net.m, net.nn],
        "anchor": [net.anchor[0] // 2, net.anchor[1] // 2],
        "cells": net.cell_count(),
        "strands": len(strands),
        "strand_lengths": sorted(s.length for s in strands),
        "self_crossings": sorted(s.self_crossings() for s in strands),
        "rotations": len(perms),
        "transitive_on_strands": net.rotations_transitive_on_strands(),
    }
    if net.striping is not None:
        dark = sum(1 for s in strands if s.colour)
        out["dark_strands"] = dark
        out["pale_strands"] = len(strands) - dark
        out["perfect"] = is_perfect_cube(net)
    faces_visited = {s.index: set() for s in strands}
    for s in strands:
        for cid, _ in s.visits:
            faces_visited[s.index].add(net.id_info[cid][0])
    out["strands_visiting_all_faces"] = sum(
        1 for v in faces_visited.values() if len(v) == 6
    )
    return out
