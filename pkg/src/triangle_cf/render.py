"""SVG pictures of the tessellation in the upper half-plane model."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .engine import ExpansionResult
from .geometry import INFINITY, heptagon
from .group import GroupElement

X_RANGE = (-2.5, 2.5)
Y_RANGE = (0.0, 3.0)
SCALE = 200.0  # pixels per unit


def _to_complex(v) -> complex:
    x = float(v.x)
    return complex(x, math.sqrt(max(float(v.n) - x * x, 0.0)))


def _apply(g: GroupElement, z: complex) -> complex:
    a, b, c, d = (float(e) for e in g.entries())
    return (a * z + b) / (c * z + d)


def tile_vertices(g: GroupElement) -> list[complex]:
    """Vertices of the heptagon translated by g, in order."""
    return [_apply(g, _to_complex(V)) for V in heptagon().vertices]


def _screen(z: complex) -> tuple[float, float]:
    return ((z.real - X_RANGE[0]) * SCALE, (Y_RANGE[1] - z.imag) * SCALE)


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _arc_to(p: complex, q: complex) -> str:
    """Path command drawing the geodesic arc from p to q (both in the closed half-plane)."""
    qx, qy = _screen(q)
    if abs(p.real - q.real) < 1e-12 * max(1.0, abs(p.real)):
        return f"L {_fmt(qx)} {_fmt(qy)}"
    centre = (abs(p) ** 2 - abs(q) ** 2) / (2 * (p.real - q.real))
    radius = abs(p - centre) * SCALE
    # right-to-left along an upper arc is counterclockwise, i.e. a positive sweep on screen
    sweep = 1 if p.real > q.real else 0
    return f"A {_fmt(radius)} {_fmt(radius)} 0 0 {sweep} {_fmt(qx)} {_fmt(qy)}"


def tile_path(g: GroupElement) -> str:
    pts = tile_vertices(g)
    x0, y0 = _screen(pts[0])
    cmds = [f"M {_fmt(x0)} {_fmt(y0)}"]
    for k in range(7):
        cmds.append(_arc_to(pts[k], pts[(k + 1) % 7]))
    return " ".join(cmds) + " Z"


def geodesic_path(beta, alpha) -> str:
    if alpha is INFINITY or beta is INFINITY:
        x = float(beta if alpha is INFINITY else alpha)
        sx, _ = _screen(complex(x, 0))
        return f"M {_fmt(sx)} {_fmt(Y_RANGE[1] * SCALE)} L {_fmt(sx)} 0.000"
    p, q = complex(float(beta), 0), complex(float(alpha), 0)
    x0, y0 = _screen(p)
    return f"M {_fmt(x0)} {_fmt(y0)} " + _arc_to(p, q)


def render_svg(result: ExpansionResult, tiles: int = 0) -> str:
    """The heptagon, its translates ``B_k D`` for k <= tiles and the geodesic."""
    width = (X_RANGE[1] - X_RANGE[0]) * SCALE
    height = (Y_RANGE[1] - Y_RANGE[0]) * SCALE
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        "<style>.tile{fill:none;stroke:#445;stroke-width:1}.base{fill:#dde6f5}"
        ".geodesic{fill:none;stroke:#c21;stroke-width:2}text{font:12px sans-serif}</style>",
        f'<line x1="0" y1="{_fmt(height)}" x2="{_fmt(width)}" y2="{_fmt(height)}" stroke="#000"/>',
    ]
    for k, B in enumerate(result.iter_B(tiles)):
        cls = "tile base" if k == 0 else "tile"
        out.append(f'<path class="{cls}" data-k="{k}" d="{tile_path(B)}"/>')
    geo = result.geodesic
    out.append(f'<path class="geodesic" d="{geodesic_path(geo.beta, geo.alpha)}"/>')

    hep = heptagon()
    verts = [_to_complex(V) for V in hep.vertices]
    for i in range(7):
        p, q = verts[i], verts[(i + 1) % 7]
        mid = (p + q) / 2
        x, y = _screen(mid)
        out.append(f'<text class="edge-label" x="{_fmt(x)}" y="{_fmt(y)}">{escape(f"e{i}")}</text>')
    for name, z in (("tau3", verts[0]), ("tau7", _to_complex(hep.tau7))):
        x, y = _screen(z)
        out.append(f'<circle class="vertex" cx="{_fmt(x)}" cy="{_fmt(y)}" r="3"/>')
        out.append(f'<text x="{_fmt(x + 4)}" y="{_fmt(y - 4)}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
