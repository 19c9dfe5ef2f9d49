"""File formats: pattern grids, shape family files, certificates,
configurations, region lists, and run manifests.

Rationals travel as ``"p/q"`` strings (``q > 0``, reduced) and plain
integers stay bare, so exactness survives a round trip.  All JSON is
emitted with sorted keys and fixed separators: identical values always
serialize to identical bytes.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .certificate import (Box, Certificate, Configuration, Frame, Window,
                          Witness)
from .geometry import DiamondSpec, RectSpec
from .patterns import Pattern
from .rationals import R2, parse_fraction, pt

Site = Tuple[int, int]
_F = Fraction


def rat_to_json(v: Fraction) -> Union[int, str]:
    v = _F(v)
    if v.denominator == 1:
        return int(v)
    return f"{v.numerator}/{v.denominator}"


def rat_from_json(v: Union[int, str]) -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise ValueError(f"not an exact rational: {v!r}")
    if isinstance(v, int):
        return _F(v)
    return parse_fraction(v)


def point_to_json(p: R2) -> List[Union[int, str]]:
    return [rat_to_json(p.x), rat_to_json(p.y)]


def point_from_json(v: Sequence[Union[int, str]]) -> R2:
    if len(v) != 2:
        raise ValueError(f"not a point: {v!r}")
    return pt(rat_from_json(v[0]), rat_from_json(v[1]))


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def write_text(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


# ---------------------------------------------------------------------------
# pattern grids


def pattern_to_text(p: Pattern) -> str:
    """Render a full-rectangle pattern as a digit grid, top row first.

    The header is ``pattern <width> <height> <alphabet_size>``; the origin
    is normalized away, so loading gives a translate of the original.
    """
    if p.alphabet_size > 10:
        raise ValueError("text format carries single-digit symbols only")
    x0, y0, w, h = p.bbox()
    if not p.is_full_rect():
        raise ValueError("only full rectangular patterns have a text form")
    lines = [f"pattern {w} {h} {p.alphabet_size}"]
    for row in range(h):
        y = y0 + h - 1 - row
        lines.append("".join(str(p[(x0 + i, y)]) for i in range(w)))
    return "\n".join(lines) + "\n"


def pattern_from_text(text: str) -> Pattern:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("pattern"):
        raise ValueError("missing 'pattern <w> <h> <alphabet>' header")
    parts = lines[0].split()
    if len(parts) != 4:
        raise ValueError(f"malformed pattern header: {lines[0]!r}")
    w, h, alpha = (int(v) for v in parts[1:])
    rows = lines[1:]
    if len(rows) != h:
        raise ValueError(f"expected {h} rows, found {len(rows)}")
    cells = {}
    for row, ln in enumerate(rows):
        if len(ln) != w:
            raise ValueError(f"row {row} has width {len(ln)}, expected {w}")
        y = h - 1 - row
        for x, ch in enumerate(ln):
            cells[(x, y)] = int(ch)
    return Pattern(cells=cells, alphabet_size=alpha)


# ---------------------------------------------------------------------------
# shape family files


def family_to_json(kind: str,
                   families: Sequence[Sequence[Union[DiamondSpec, RectSpec]]],
                   dims: Optional[Sequence[Tuple[Fraction, Fraction]]] = None) -> dict:
    """Leveled diamond or rectangle families with a per-level dims header."""
    if kind not in ("diamonds", "rects"):
        raise ValueError(f"unknown family kind {kind!r}")
    if dims is None:
        dims = []
        for n, fam in enumerate(families, start=1):
            if not fam:
                raise ValueError(f"level {n} is empty and no dims were given")
            dims.append((fam[0].w, fam[0].h))
    doc = {
        "kind": kind,
        "dims": [{"level": n, "w": rat_to_json(_F(w)), "h": rat_to_json(_F(h))}
                 for n, (w, h) in enumerate(dims, start=1)],
        "members": [
            {"level": n, "cx": rat_to_json(m.center.x),
             "cy": rat_to_json(m.center.y),
             "w": rat_to_json(m.w), "h": rat_to_json(m.h)}
            for n, fam in enumerate(families, start=1)
            for m in fam
        ],
    }
    return doc


def family_from_json(doc: dict):
    """Returns (kind, families, dims); families grouped by the dims levels."""
    kind = doc.get("kind")
    if kind not in ("diamonds", "rects"):
        raise ValueError(f"unknown family kind {kind!r}")
    dims_rows = sorted(doc.get("dims", ()), key=lambda d: d["level"])
    if [d["level"] for d in dims_rows] != list(range(1, len(dims_rows) + 1)):
        raise ValueError("dims must cover levels 1..N exactly")
    dims = [(rat_from_json(d["w"]), rat_from_json(d["h"])) for d in dims_rows]
    families: List[List[Union[DiamondSpec, RectSpec]]] = [[] for _ in dims]
    cls = DiamondSpec if kind == "diamonds" else RectSpec
    for m in doc.get("members", ()):
        lvl = int(m["level"])
        if not 1 <= lvl <= len(dims):
            raise ValueError(f"member level {lvl} has no dims entry")
        families[lvl - 1].append(
            cls(center=pt(rat_from_json(m["cx"]), rat_from_json(m["cy"])),
                w=rat_from_json(m["w"]), h=rat_from_json(m["h"]), level=lvl))
    return kind, [tuple(f) for f in families], dims


# ---------------------------------------------------------------------------
# certificates and configurations


def certificate_to_json(c: Certificate) -> dict:
    levels = sorted({f.level for f in c.frames})
    return {
        "levels": [
            {
                "level": n,
                "frames": [
                    {
                        "frame_id": f.frame_id,
                        "center": point_to_json(f.center),
                        "radius": rat_to_json(f.radius),
                        "orientation": f.orientation,
                        "boxes": [
                            {
                                "box_id": b.box_id,
                                "center": point_to_json(b.center),
                                "orientation": b.orientation,
                                "w": rat_to_json(b.w),
                                "h": rat_to_json(b.h),
                                "k_sec": b.k_sec,
                                "witnesses": [
                                    {
                                        "witness_id": w.witness_id,
                                        "point": point_to_json(w.point),
                                        "anchor": [w.anchor[0], w.anchor[1]],
                                        "sigma": w.sigma,
                                        "relocated": w.relocated,
                                    }
                                    for w in b.witnesses
                                ],
                            }
                            for b in sorted(f.boxes, key=lambda b: b.box_id)
                        ],
                    }
                    for f in sorted(c.frames_at(n), key=lambda f: f.frame_id)
                ],
            }
            for n in levels
        ]
    }


def certificate_from_json(doc: dict) -> Certificate:
    cert = Certificate()
    for lvl in doc.get("levels", ()):
        n = int(lvl["level"])
        for frec in lvl["frames"]:
            fid = int(frec["frame_id"])
            boxes = []
            for brec in frec["boxes"]:
                bid = int(brec["box_id"])
                witnesses = tuple(
                    Witness(witness_id=int(wrec["witness_id"]), box_id=bid,
                            point=point_from_json(wrec["point"]),
                            anchor=(int(wrec["anchor"][0]), int(wrec["anchor"][1])),
                            sigma=int(wrec["sigma"]),
                            relocated=bool(wrec.get("relocated", False)))
                    for wrec in brec["witnesses"])
                boxes.append(Box(box_id=bid, frame_id=fid, level=n,
                                 center=point_from_json(brec["center"]),
                                 orientation=int(brec["orientation"]),
                                 w=rat_from_json(brec["w"]),
                                 h=rat_from_json(brec["h"]),
                                 k_sec=int(brec["k_sec"]),
                                 witnesses=witnesses))
            cert = cert.with_frame(
                Frame(frame_id=fid, level=n, center=point_from_json(frec["center"]),
                      radius=rat_from_json(frec["radius"]),
                      orientation=int(frec["orientation"]), boxes=tuple(boxes)))
    return cert


def configuration_to_json(cfg: Configuration) -> dict:
    return {
        "fill": cfg.fill,
        "entries": [[[s[0], s[1]], comp, face] for (s, comp, face) in cfg.entries],
    }


def configuration_from_json(doc: dict) -> Configuration:
    entries = tuple(
        ((int(rec[0][0]), int(rec[0][1])), int(rec[1]), str(rec[2]))
        for rec in doc.get("entries", ()))
    return Configuration(entries=entries, fill=str(doc.get("fill", "H")))


# ---------------------------------------------------------------------------
# region files: one "x y" site per line


def region_to_text(sites: Iterable[Site]) -> str:
    rows = sorted({(int(s[0]), int(s[1])) for s in sites})
    return "".join(f"{x} {y}\n" for (x, y) in rows)


def region_from_text(text: str) -> List[Site]:
    sites = []
    for ln_no, ln in enumerate(text.splitlines(), start=1):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"line {ln_no}: expected 'x y', got {ln!r}")
        sites.append((int(parts[0]), int(parts[1])))
    return sites


# ---------------------------------------------------------------------------
# run manifests


@dataclass(frozen=True)
class RunManifest:
    """What a CLI run was asked to do, recorded next to its outputs."""

    subcommand: str
    inputs: Tuple[str, ...] = ()
    profile: Optional[str] = None
    window: Optional[Tuple[int, int, int, int]] = None
    budget: Optional[int] = None
    seed: int = 0
    out: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "inputs": list(self.inputs),
            "profile": self.profile,
            "window": list(self.window) if self.window else None,
            "budget": self.budget,
            "seed": self.seed,
            "out": self.out,
        }

    def save(self, out_dir: str) -> str:
        path = os.path.join(out_dir, "manifest.json")
        write_text(path, dumps(self.to_json()))
        return path


def window_to_json(w: Window) -> List[int]:
    return [w.x0, w.y0, w.x1, w.y1]


def parse_window(text: str) -> Window:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"window must be 'x0,y0,x1,y1', got {text!r}")
    return Window(*(int(v.strip()) for v in parts))


def parse_point(text: str) -> R2:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"point must be 'x,y', got {text!r}")
    return pt(parse_fraction(parts[0].strip()), parse_fraction(parts[1].strip()))
