"""Deterministic SVG emission for hulls, safe paths, certificates, glue runs.

Scenes collect exact-rational primitives into styled layers; rendering
approximates coordinates only at the last moment, as 12-significant-digit
decimals.  No geometric decision ever reads the approximations, and equal
scenes render to equal bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .certificate import Certificate, Profile, Window, box_axes
from .geometry import DiamondSpec, Hull, RectSpec
from .rationals import R2, decimal_str, pt

_F = Fraction

_STYLE = """\
  .diamond { fill: none; stroke: #245a8f; stroke-width: 0.6%; }
  .rect { fill: none; stroke: #245a8f; stroke-width: 0.6%; }
  .hull { fill: #9db8d2; fill-opacity: 0.55; stroke: #245a8f; stroke-width: 0.3%; }
  .path { fill: none; stroke: #b3501e; stroke-width: 0.8%; }
  .point { fill: #b3501e; stroke: none; }
  .frame { fill: none; stroke: #777777; stroke-width: 0.3%; stroke-dasharray: 2% 1%; }
  .box { fill: none; stroke: #2e7d32; stroke-width: 0.4%; }
  .witness { fill: #2e7d32; stroke: none; }
  .witness-moved { fill: #b3501e; stroke: #7a2d00; stroke-width: 0.2%; }
  .window { fill: none; stroke: #000000; stroke-width: 0.25%; }
  .patch { fill: #c65b5b; fill-opacity: 0.8; stroke: none; }
  .moat { fill: none; stroke: #c65b5b; stroke-width: 0.35%; stroke-dasharray: 1% 1%; }
"""


@dataclass
class SvgScene:
    """Ordered drawing primitives; bounds grow as content is added."""

    elements: List[str] = field(default_factory=list)
    _xs: List[Fraction] = field(default_factory=list)
    _ys: List[Fraction] = field(default_factory=list)

    # -- geometry sinks -------------------------------------------------------

    def _track(self, points: Iterable[R2]) -> None:
        for p in points:
            self._xs.append(_F(p.x))
            self._ys.append(_F(p.y))

    def add_polygon(self, points: Sequence[R2], cls: str) -> None:
        if len(points) < 3:
            raise ValueError("polygon needs at least three vertices")
        self._track(points)
        coords = " ".join(f"{_dec(p.x)},{_dec(p.y)}" for p in points)
        self.elements.append(f'<polygon class="{cls}" points="{coords}"/>')

    def add_polyline(self, points: Sequence[R2], cls: str) -> None:
        if len(points) < 2:
            raise ValueError("polyline needs at least two vertices")
        self._track(points)
        coords = " ".join(f"{_dec(p.x)},{_dec(p.y)}" for p in points)
        self.elements.append(f'<polyline class="{cls}" points="{coords}"/>')

    def add_circle(self, center: R2, radius: Fraction, cls: str) -> None:
        r = _F(radius)
        if r <= 0:
            raise ValueError("circle radius must be positive")
        self._track([pt(center.x - r, center.y - r), pt(center.x + r, center.y + r)])
        self.elements.append(f'<circle class="{cls}" cx="{_dec(center.x)}" '
                             f'cy="{_dec(center.y)}" r="{_dec(r)}"/>')

    def add_dot(self, p: R2, cls: str) -> None:
        """Fixed-size marker; radius resolves against the final viewport."""
        self._track([p])
        self.elements.append(f'<circle class="{cls}" cx="{_dec(p.x)}" '
                             f'cy="{_dec(p.y)}" r="0.7%"/>')

    @property
    def empty(self) -> bool:
        return not self.elements


def _dec(v) -> str:
    return decimal_str(_F(v), 12)


def render_svg(scene: SvgScene) -> str:
    """Standalone SVG document; raises on an empty scene."""
    if scene.empty:
        raise ValueError("refusing to render an empty scene")
    x0, x1 = min(scene._xs), max(scene._xs)
    y0, y1 = min(scene._ys), max(scene._ys)
    w = x1 - x0
    h = y1 - y0
    mx = w / 20 if w else _F(1)
    my = h / 20 if h else _F(1)
    # plane y grows upward; svg y grows downward -- flip via a group
    # transform and a viewBox stated in flipped coordinates
    vb = (x0 - mx, -(y1 + my), w + 2 * mx, h + 2 * my)
    body = "\n".join("  " + el for el in scene.elements)
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_dec(vb[0])} {_dec(vb[1])} {_dec(vb[2])} {_dec(vb[3])}">\n'
        f"<style>\n{_STYLE}</style>\n"
        '<g transform="scale(1,-1)">\n'
        f"{body}\n"
        "</g>\n"
        "</svg>\n"
    )


# ---------------------------------------------------------------------------
# scene builders


def hull_scene(hull: Hull,
               families: Sequence[Sequence[DiamondSpec]] = ()) -> SvgScene:
    scene = SvgScene()
    for region in hull.elements:
        scene.add_polygon(region.boundary(), "hull")
    for fam in families:
        for d in fam:
            verts = d.vertices()
            if len(verts) >= 3:
                scene.add_polygon(verts, "diamond")
            else:
                scene.add_polyline(verts, "diamond")
    return scene


def _rect_corners(r: RectSpec) -> Tuple[R2, ...]:
    c, hw, hh = r.center, r.w / 2, r.h / 2
    return (pt(c.x - hw, c.y - hh), pt(c.x + hw, c.y - hh),
            pt(c.x + hw, c.y + hh), pt(c.x - hw, c.y + hh))


def path_scene(families: Sequence[Sequence[RectSpec]], path: Sequence[R2],
               start: Optional[R2] = None) -> SvgScene:
    scene = SvgScene()
    for fam in families:
        for r in fam:
            scene.add_polygon(_rect_corners(r), "rect")
    if len(path) >= 2:
        scene.add_polyline(path, "path")
    if start is not None:
        scene.add_dot(start, "point")
    return scene


def certificate_scene(cert: Certificate, p: Profile,
                      window: Optional[Window] = None) -> SvgScene:
    scene = SvgScene()
    if window is not None:
        scene.add_polygon((pt(window.x0, window.y0), pt(window.x1, window.y0),
                           pt(window.x1, window.y1), pt(window.x0, window.y1)),
                          "window")
    for f in sorted(cert.frames, key=lambda f: f.frame_id):
        scene.add_circle(f.center, f.radius, "frame")
        for b in sorted(f.boxes, key=lambda b: b.box_id):
            u, v = box_axes(p, b)
            hw, hh = b.w / 2, b.h / 2
            corners = tuple(b.center + u.scale(su * hw) + v.scale(sv * hh)
                            for su, sv in ((-1, -1), (1, -1), (1, 1), (-1, 1)))
            scene.add_polygon(corners, "box")
            for w in b.witnesses:
                scene.add_dot(w.point, "witness-moved" if w.relocated else "witness")
    return scene


def _site_outline(sites) -> List[List[R2]]:
    """Closed outlines of a set of unit squares centered on sites."""
    edge_count = {}
    for (x, y) in sites:
        # square [x-1/2, x+1/2] x [y-1/2, y+1/2] on the doubled integer grid
        i, j = 2 * x - 1, 2 * y - 1
        for e in (((i, j), (i + 2, j)), ((i, j + 2), (i + 2, j + 2)),
                  ((i, j), (i, j + 2)), ((i + 2, j), (i + 2, j + 2))):
            edge_count[e] = edge_count.get(e, 0) + 1
    pool = {e for e, cnt in edge_count.items() if cnt == 1}
    adj = {}
    for (a, b) in pool:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    for vtx in adj:
        adj[vtx].sort()
    outlines = []
    while pool:
        first = min(pool)
        pool.discard(first)
        loop = [first[0], first[1]]
        while loop[-1] != loop[0]:
            cur = loop[-1]
            nxt = None
            for nb in adj[cur]:
                e = (cur, nb) if cur < nb else (nb, cur)
                if e in pool:
                    nxt = nb
                    pool.discard(e)
                    break
            if nxt is None:
                break
            loop.append(nxt)
        outlines.append([pt(_F(i, 2), _F(j, 2)) for (i, j) in loop])
    return outlines


def glue_scene(result, p: Profile, window: Optional[Window] = None) -> SvgScene:
    """Zones, surviving frames, and (relocated) witnesses of a glue run."""
    scene = certificate_scene(result.certificate, p, window)
    for outline in _site_outline(sorted(result.setup.patch)):
        if len(outline) >= 3:
            scene.add_polygon(outline[:-1], "patch")
    for outline in _site_outline(sorted(result.setup.zone)):
        if len(outline) >= 3:
            scene.add_polygon(outline[:-1], "moat")
    return scene
