"""Command-line surface.

Exit codes: 0 ok, 2 parse error, 3 precondition violation, 4 internal
invariant breach.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import DesignParseError, InvariantError, PreconditionError
from .grid import TorusDesign, canonical, double, order, reverse_view
from .interlace import falls_apart
from .striping import ColouredFabric, Striping, perfect_stripings, striping_classes
from .symmetry import detect_group, genus_v_rows, signature, species


def _load_design(path) -> TorusDesign:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("P1"):
        from .render import parse_pbm

        return parse_pbm(text)
    return TorusDesign.from_text(text)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _striping_from_args(args) -> Striping:
    return Striping(args.kind, args.warp_phase, args.weft_phase)


def _add_striping_args(sub):
    sub.add_argument("--kind", choices=("thin", "thick"), default="thick")
    sub.add_argument("--warp-phase", type=int, default=0)
    sub.add_argument("--weft-phase", type=int, default=0)


def cmd_classify(args):
    d = _load_design(args.design)
    group = detect_group(d)
    sig = signature(group)
    fa, witness = falls_apart(d)
    report = {
        "order": order(d),
        "isonemal": group.strand_orbits() == 1,
        "falls_apart": fa,
        "genus_v_rows": genus_v_rows(d),
        "species": species(sig).name,
        "signature": sig.to_json(),
    }
    if fa:
        report["witness"] = {"warps": list(witness.warps), "wefts": list(witness.wefts)}
    _write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_id(args):
    from .catalogue import catalogue_k

    d = _load_design(args.design)
    c = canonical(d)
    fa, _ = falls_apart(d)
    report = {
        "order": c.n,
        "k": catalogue_k(d),
        "star": fa,
        "name": f"{c.n}-{catalogue_k(d)}{'*' if fa else ''}",
        "canonical": list(reversed(c.rows_bottom_first())),
    }
    _write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_fallapart(args):
    d = _load_design(args.design)
    fa, witness = falls_apart(d)
    report = {"falls_apart": fa}
    if fa:
        report["witness"] = {"warps": list(witness.warps), "wefts": list(witness.wefts)}
    _write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_double(args):
    d = _load_design(args.design)
    _write(args.out, double(d).to_text())
    return 0


def cmd_pattern(args):
    d = _load_design(args.design)
    cf = ColouredFabric(d, _striping_from_args(args))
    patt = cf.obverse_pattern() if args.side == "obverse" else cf.reverse_pattern()
    _write(args.out, patt.to_text())
    return 0


def cmd_stripe(args):
    d = _load_design(args.design)
    s = _striping_from_args(args)
    cf = ColouredFabric(d, s)
    classes = striping_classes(d, kinds=(s.kind,))
    report = {
        "striping": {"kind": s.kind, "warp_phase": s.warp_phase, "weft_phase": s.weft_phase},
        "perfect": cf.is_perfect(),
        "redundancy": list(reversed(cf.redundancy_map().rows_bottom_first())),
        "obverse": list(reversed(cf.obverse_pattern().rows_bottom_first())),
        "reverse": list(reversed(cf.reverse_pattern().rows_bottom_first())),
        "classes": [
            {
                "representative": {
                    "warp_phase": c.representative.warp_phase,
                    "weft_phase": c.representative.weft_phase,
                },
                "perfect": c.perfect,
                "members": len(c.members),
            }
            for c in classes
        ],
    }
    _write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    if args.obverse_out:
        _write(args.obverse_out, cf.obverse_pattern().to_text())
    if args.reverse_out:
        _write(args.reverse_out, cf.reverse_pattern().to_text())
    if args.figure:
        from .render import stripe_figure

        stripe_figure(d, s, args.figure)
    if args.svg:
        from .render import RenderSpec, render_svg

        _write(args.svg, render_svg(cf.obverse_pattern(),
                                    RenderSpec("svg", show_strand_extensions=True),
                                    striping=s))
    return 0


def cmd_enumerate(args):
    from .catalogue import QtGroupSpec, conformance_report, enumerate_catalogue

    spec = QtGroupSpec(args.basis[0], args.basis[1], args.tau_corner, args.tau_centre)
    run = enumerate_catalogue(spec, args.period)
    lines = [json.dumps(e.to_json(), sort_keys=True) for e in run.all_entries()]
    _write(args.out, "\n".join(lines) + "\n")
    summary = {
        "free_orbits": run.free_orbits,
        "colourings": run.colourings,
        "entries": len(run.entries),
        "collapsed": len(run.collapsed),
    }
    sys.stderr.write(json.dumps(summary, sort_keys=True) + "\n")
    if args.sheet:
        from .render import catalogue_sheet

        catalogue_sheet(
            run.all_entries(), args.sheet,
            title=f"catalogue basis {spec.mn} period {args.period}",
        )
    if args.conformance:
        _write(args.conformance, conformance_report(run))
    return 0


def cmd_reverse33(args):
    from .reconstruct import rebuild_33_4

    p = _load_design(args.design)
    result = rebuild_33_4(p, centre_block_weave=args.choices, free_block_fill=args.fill)
    _write(args.out, result.fabric.to_text())
    report = {
        "species": result.species,
        "striping": {
            "kind": result.striping.kind,
            "warp_phase": result.striping.warp_phase,
            "weft_phase": result.striping.weft_phase,
        },
        "roundtrip": result.roundtrip_pattern() == p,
    }
    sys.stderr.write(json.dumps(report, sort_keys=True) + "\n")
    return 0


def cmd_mirrorfit(args):
    from .reconstruct import PartialDesign, mirror_fit

    text = Path(args.design).read_text(encoding="utf-8")
    p = PartialDesign.from_text(text)
    axes = mirror_fit(p)
    report = [
        {"direction": d, "position": pos, "tau": int(t)} for d, pos, t in axes
    ]
    _write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_cube(args):
    from .cube import build_net, cube_report

    d = _load_design(args.design)
    striping = None
    if args.stripe:
        kind, wp, fp = args.stripe.split(",")
        striping = Striping(kind, int(wp), int(fp))
    net = build_net(d, tuple(args.basis), tuple(args.anchor), striping)
    report = cube_report(net)
    _write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    if args.figures:
        from .render import cube_figures

        for p in cube_figures(net, args.figures):
            sys.stderr.write(p + "\n")
    return 0


def cmd_render(args):
    from .render import RenderSpec, render

    d = _load_design(args.design)
    striping = None
    if args.stripe:
        kind, wp, fp = args.stripe.split(",")
        striping = Striping(kind, int(wp), int(fp))
    spec = RenderSpec(
        format=args.format,
        show_strand_extensions=args.extensions,
        show_centres=args.centres,
        mirror_reverse=args.mirror,
    )
    _write(args.out, render(d, spec, striping))
    return 0


def _int_pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated integers")
    return (int(parts[0]), int(parts[1]))


def build_parser():
    ap = argparse.ArgumentParser(prog="isoweave",
                                 description="periodic interlacement workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="symmetry and interlacement report")
    p.add_argument("design")
    p.add_argument("-o", "--out", default="-")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("id", help="canonical catalogue identifier")
    p.add_argument("design")
    p.add_argument("-o", "--out", default="-")
    p.set_defaults(func=cmd_id)

    p = sub.add_parser("fallapart", help="hangs-together test with witness")
    p.add_argument("design")
    p.add_argument("-o", "--out", default="-")
    p.set_defaults(func=cmd_fallapart)

    p = sub.add_parser("double", help="double a design")
    p.add_argument("design")
    p.add_argument("-o", "--out", default="-")
    p.set_defaults(func=cmd_double)

    p = sub.add_parser("pattern", help="pattern shown by a striping")
    p.add_argument("design")
    _add_striping_args(p)
    p.add_argument("--side", choices=("obverse", "reverse"), default="obverse")
    p.add_argument("-o", "--out", default="-")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("stripe", help="striping report with patterns and figures")
    p.add_argument("design")
    _add_striping_args(p)
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--obverse-out")
    p.add_argument("--reverse-out")
    p.add_argument("--figure", help="matplotlib figure path (png/svg)")
    p.add_argument("--svg", help="deterministic SVG with strand extensions")
    p.set_defaults(func=cmd_stripe)

    p = sub.add_parser("enumerate", help="catalogue enumeration from a quarter-turn lattice")
    p.add_argument("--basis", type=_int_pair, required=True, metavar="M,N")
    p.add_argument("--tau-corner", action="store_true")
    p.add_argument("--tau-centre", action="store_true")
    p.add_argument("--period", type=int, required=True)
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--sheet", help="matplotlib catalogue sheet path")
    p.add_argument("--conformance", help="write the conformance report here")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("reverse33", help="rebuild the plain-quarter-turn fabric behind a design")
    p.add_argument("design")
    p.add_argument("--choices", choices=("same", "opposite"), default="same")
    p.add_argument("--fill", choices=("straight", "search"), default="straight")
    p.add_argument("-o", "--out", default="-")
    p.set_defaults(func=cmd_reverse33)

    p = sub.add_parser("mirrorfit", help="mirror axes consistent with a partial design")
    p.add_argument("design")
    p.add_argument("-o", "--out", default="-")
    p.set_defaults(func=cmd_mirrorfit)

    p = sub.add_parser("cube", help="woven cube report from lattice units")
    p.add_argument("--design", required=True)
    p.add_argument("--basis", type=_int_pair, required=True, metavar="M,N")
    p.add_argument("--anchor", type=_int_pair, required=True, metavar="X,Y")
    p.add_argument("--stripe", help="kind,warp-phase,weft-phase")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--figures", help="prefix for axonometric view images")
    p.set_defaults(func=cmd_cube)

    p = sub.add_parser("render", help="render a design to ascii/pbm/svg")
    p.add_argument("design")
    p.add_argument("--format", choices=("ascii", "pbm", "svg"), default="svg")
    p.add_argument("--extensions", action="store_true")
    p.add_argument("--centres", action="store_true")
    p.add_argument("--mirror", action="store_true")
    p.add_argument("--stripe", help="kind,warp-phase,weft-phase")
    p.add_argument("-o", "--out", default="-")
    p.set_defaults(func=cmd_render)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except DesignParseError as e:
        sys.stderr.write(f"parse error: {e}\n")
        return 2
    except PreconditionError as e:
        sys.stderr.write(f"precondition violated: {e}\n")
        return 3
    except InvariantError as e:
        sys.stderr.write(f"internal invariant breach: {e}\n")
        return 4


if __name__ == "__main__":
    sys.exit(main())
