"""Design rendering: byte-stable SVG/PBM/ASCII plus report figures.

The SVG writer is deterministic (integer coordinates, fixed ordering) so
its output can be golden-tested.  Report figures (catalogue sheets,
striping diagrams, cube views) go through matplotlib and are meant for
humans, not for byte comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .grid import TorusDesign
from .striping import ColouredFabric, Striping

_CELL = 20  # pixels per cell; doubled coordinates scale by 10
_DARK = "#1b1b1b"
_PALE = "#f2ead7"
_EXT = 14


@dataclass(frozen=True)
class RenderSpec:
    format: str = "svg"  # ascii | pbm | svg
    show_strand_extensions: bool = False
    show_centres: bool = False
    mirror_reverse: bool = False


def render_ascii(d: TorusDesign) -> str:
    return d.to_text()


def render_pbm(d: TorusDesign) -> str:
    n = d.n
    rows = []
    for j in range(n - 1, -1, -1):
        rows.append(" ".join("1" if d.arr[i, j] else "0" for i in range(n)))
    return f"P1\n{n} {n}\n" + "\n".join(rows) + "\n"


def parse_pbm(text: str) -> TorusDesign:
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if not tokens or tokens[0] != "P1":
        raise PreconditionError("not an ASCII PBM file")
    w, h = int(tokens[1]), int(tokens[2])
    if w != h:
        raise PreconditionError("design PBM must be square")
    bits = [t for t in tokens[3:]]
    if len(bits) != w * h:
        raise PreconditionError("PBM size mismatch")
    arr = np.zeros((w, w), dtype=bool)
    k = 0
    for jj in range(h):
        j = h - 1 - jj
        for i in range(w):
            arr[i, j] = bits[k] == "1"
            k += 1
    return TorusDesign(arr)


def _marker_svg(x, y, kind, tau):
    """Rotation-centre marker: squares for quarter-turns, diamonds for
    half-turns; filled when the turn reverses sides."""
    fill = _DARK if tau else "none"
    stroke = _DARK
    if kind == "quarter":
        s = 5
        return (
            f'<rect x="{x - s}" y="{y - s}" width="{2 * s}" height="{2 * s}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="2"/>'
        )
    s = 7
    pts = f"{x},{y - s} {x + s},{y} {x},{y + s} {x - s},{y}"
    return f'<polygon points="{pts}" fill="{fill}" stroke="{stroke}" stroke-width="2"/>'


def render_svg(
    d: TorusDesign,
    spec: RenderSpec = RenderSpec(),
    striping: Striping | None = None,
) -> str:
    """Deterministic SVG of a design.

    Strand extensions need a striping; centre markers run group detection.
    ``mirror_reverse`` flips the image about a vertical axis, the display
    convention for reverse views.
    """
    n = d.n
    margin = _EXT if (spec.show_strand_extensions and striping) else 4
    size = n * _CELL + 2 * margin
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>',
    ]

    def cx(i):
        col = (n - 1 - i) if spec.mirror_reverse else i
        return margin + col * _CELL

    def cy(j):
        return margin + (n - 1 - j) * _CELL

    for j in range(n):
        for i in range(n):
            colour = _DARK if d.arr[i, j] else _PALE
            out.append(
                f'<rect x="{cx(i)}" y="{cy(j)}" width="{_CELL}" height="{_CELL}" '
                f'fill="{colour}" stroke="#999999" stroke-width="1"/>'
            )
    if spec.show_strand_extensions and striping is not None:
        wc, fc = striping.colours(n)
        for i in range(n):
            colour = _DARK if wc[i] else _PALE
            x = cx(i) + 5
            out.append(
                f'<rect x="{x}" y="{margin - _EXT + 2}" width="10" height="{_EXT - 4}" '
                f'fill="{colour}" stroke="#555555" stroke-width="1"/>'
            )
            out.append(
                f'<rect x="{x}" y="{margin + n * _CELL + 2}" width="10" height="{_EXT - 4}" '
                f'fill="{colour}" stroke="#555555" stroke-width="1"/>'
            )
        for j in range(n):
            colour = _DARK if fc[j] else _PALE
            y = cy(j) + 5
            out.append(
                f'<rect x="{margin - _EXT + 2}" y="{y}" width="{_EXT - 4}" height="10" '
                f'fill="{colour}" stroke="#555555" stroke-width="1"/>'
            )
            out.append(
                f'<rect x="{margin + n * _CELL + 2}" y="{y}" width="{_EXT - 4}" height="10" '
                f'fill="{colour}" stroke="#555555" stroke-width="1"/>'
            )
    if spec.show_centres:
        from .symmetry import detect_group, signature

        group = detect_group(d)
        sig = signature(group)
        for c in list(group.quarter_centres) + list(group.half_centres):
            px, py = c.position
            if not (0 <= px < 2 * n and 0 <= py < 2 * n):
                continue
            x = margin + ((2 * n - px) if spec.mirror_reverse else px) * (_CELL // 2)
            y = margin + (2 * n - py) * (_CELL // 2)
            kind = c.kind if c.kind == "quarter" else "half"
            if c.kind == "half" and any(
                q.position == c.position for q in group.quarter_centres
            ):
                continue  # quarter-turn marker already drawn there
            out.append(_marker_svg(x, y, kind, c.tau))
        if sig.quarter is not None:
            m2, n2 = 2 * sig.quarter.mn[0], 2 * sig.quarter.mn[1]
            ax, ay = sig.quarter.corner_anchor
            pts = [
                (ax, ay),
                (ax + m2, ay + n2),
                (ax + m2 - n2, ay + n2 + m2),
                (ax - n2, ay + m2),
            ]
            path = " ".join(
                f"{margin + px * (_CELL // 2)},{margin + (2 * n - py) * (_CELL // 2)}"
                for px, py in pts
            )
            out.append(
                f'<polygon points="{path}" fill="none" stroke="#c03030" '
                f'stroke-width="2" stroke-dasharray="6,4"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(d: TorusDesign, spec: RenderSpec, striping: Striping | None = None) -> str:
    if spec.format == "ascii":
        return render_ascii(d)
    if spec.format == "pbm":
        return render_pbm(d)
    if spec.format == "svg":
        return render_svg(d, spec, striping)
    raise PreconditionError(f"unsupported format {spec.format!r}")


# ---------------------------------------------------------------------------
# matplotlib report figures


def _mpl():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _design_image(d: TorusDesign):
    # row 0 of the image is the top row of the design
    return (~d.arr.T[::-1, :]).astype(float)


def catalogue_sheet(entries, path, columns=6, title=None):
    """Figure with one panel per catalogue entry, named n-k-j*."""
    plt = _mpl()
    rows = (len(entries) + columns - 1) // columns
    fig, axes = plt.subplots(rows, columns, figsize=(2.1 * columns, 2.4 * rows))
    axes = np.atleast_2d(axes)
    for ax in axes.ravel():
        ax.axis("off")
    for k, e in enumerate(entries):
        ax = axes[k // columns][k % columns]
        ax.imshow(_design_image(e.design), cmap="gray", vmin=0, vmax=1,
                  interpolation="nearest")
        ax.set_title(e.name, fontsize=9)
        ax.axis("off")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def stripe_figure(design: TorusDesign, striping: Striping, path):
    """Obverse/reverse patterns with strand extensions showing colours."""
    plt = _mpl()
    cf = ColouredFabric(design, striping)
    obverse = cf.obverse_pattern()
    reverse = cf.reverse_pattern()
    L = cf.L
    fig, axes = plt.subplots(1, 2, figsize=(9, 4.8))
    for ax, patt, name in ((axes[0], obverse, "obverse"), (axes[1], reverse, "reverse")):
        ax.imshow(_design_image(patt), cmap="gray", vmin=0, vmax=1,
                  interpolation="nearest", extent=(0, L, 0, L))
        mirrored = name == "reverse"
        wc = cf.warp_colours[::-1] if mirrored else cf.warp_colours
        for i in range(L):
            colour = "#1b1b1b" if wc[i] else "#d8d0ba"
            ax.plot([i + 0.5, i + 0.5], [L, L + 0.6], color=colour, lw=3)
            ax.plot([i + 0.5, i + 0.5], [-0.6, 0], color=colour, lw=3)
        for j in range(L):
            colour = "#1b1b1b" if cf.weft_colours[j] else "#d8d0ba"
            ax.plot([-0.6, 0], [j + 0.5, j + 0.5], color=colour, lw=3)
            ax.plot([L, L + 0.6], [j + 0.5, j + 0.5], color=colour, lw=3)
        ax.set_xlim(-1, L + 1)
        ax.set_ylim(-1, L + 1)
        ax.set_aspect("equal")
        ax.set_title(name)
        ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


_ISO_RIGHT = np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)
_ISO_UP = np.array([-1.0, 1.0, 2.0]) / np.sqrt(6.0)


def _project(p, mirrored=False):
    u = float(np.dot(_ISO_RIGHT, p))
    v = float(np.dot(_ISO_UP, p))
    return (-u, v) if mirrored else (u, v)


def cube_figures(net, path_prefix):
    """Axonometric views of the cube: the three faces around the viewing
    vertex, and the hidden three shown reflected, matching cell borders.
    Returns the two file paths written."""
    from shapely.geometry import Polygon as ShPolygon

    plt = _mpl()
    K = net.K
    if net.striping is not None:
        colours = net.visible_colours()
    else:
        n = net.design.n
        colours = np.array(
            [bool(net.design.arr[c[0] % n, c[1] % n]) for _, c, _ in net.id_info]
        )
    views = [
        ("down", (1, 5, 0), False),   # top, east, front
        ("up-mirrored", (3, 4, 2), True),  # bottom, west, back; reflected
    ]
    def resolve_id(f, cell):
        cid = net.cells_map.get((f, cell))
        if cid is not None:
            return cid
        for side in range(4):
            gl = net.gluings[(f, side)]
            mapped = gl.transform.map_cell(*cell)
            cid = net.cells_map.get((gl.partner_face, mapped))
            if cid is not None:
                return cid
        return None

    paths = []
    for tag, faces, mirrored in views:
        fig, ax = plt.subplots(figsize=(6, 6))
        for f in faces:
            corners2d = [
                net._net_corner_plane(f, dx, dy) for dx, dy in ((0, 0), (1, 0), (1, 1), (0, 1))
            ]
            face_poly = ShPolygon(corners2d)
            xs = [p[0] for p in corners2d]
            ys = [p[1] for p in corners2d]
            # draw every plane cell overlapping the face, clipped to it;
            # fragments of cells owned by a neighbouring chart resolve
            # their cube cell through the gluings
            for i in range(min(xs) // 2 - 1, max(xs) // 2 + 1):
                for j in range(min(ys) // 2 - 1, max(ys) // 2 + 1):
                    cellpoly = ShPolygon(
                        [(2 * i, 2 * j), (2 * i + 2, 2 * j),
                         (2 * i + 2, 2 * j + 2), (2 * i, 2 * j + 2)]
                    )
                    frag = cellpoly.intersection(face_poly)
                    if frag.is_empty or frag.area == 0:
                        continue
                    cid = resolve_id(f, (i, j))
                    if cid is None:
                        continue
                    pts2d = [
                        _project(np.array(_map3d_float(net, f, x, y)) / K, mirrored)
                        for x, y in frag.exterior.coords
                    ]
                    colour = "#1b1b1b" if colours[cid] else "#f2ead7"
                    ax.fill(*zip(*pts2d), facecolor=colour, edgecolor="#777777", lw=0.4)
        ax.set_aspect("equal")
        ax.axis("off")
        ax.set_title(f"cube ({tag})")
        out = f"{path_prefix}-{tag}.png"
        fig.tight_layout()
        fig.savefig(out, dpi=160)
        plt.close(fig)
        paths.append(out)
    return paths


def _map3d_float(net, face, x, y):
    a = net._face_anchor[face]
    sx, sy = x - a[0], y - a[1]
    cu = net.m * sx + net.nn * sy
    cv = -net.nn * sx + net.m * sy
    from .cube import _FRAMES

    corner, u3, v3 = _FRAMES[face]
    return tuple(net.K * corner[k] + cu * u3[k] + cv * v3[k] for k in range(3))
