"""End-to-end checks of the four-sweep merge on small certified instances."""

import dataclasses
from fractions import Fraction as F

import pytest

from aperiodic.certificate import (
    Configuration, Window, build_dense_certificate, choose_compatible_config,
    compatible, validate_certificate,
)
from aperiodic.gluing import GlueError, glue, make_regions
from aperiodic.profiles import get_profile
from aperiodic.rationals import pt

UNIT = get_profile("unit1")
GLUE1 = get_profile("glue1")
W30 = Window(-30000, -30000, 30000, 30000)
W25 = Window(-25000, -25000, 25000, 25000)


def square_patch(cx, cy, half):
    return [(x, y) for x in range(cx - half, cx + half + 1)
            for y in range(cy - half, cy + half + 1)]


def dense_pair(p, window):
    c = build_dense_certificate(p, window)
    x = choose_compatible_config(c, p)
    return x, c


# -- region setup ------------------------------------------------------------


def test_make_regions_partition_and_threshold():
    setup = make_regions(square_patch(0, 0, 2), UNIT)
    assert setup.patch == frozenset(square_patch(0, 0, 2))
    assert setup.zone == setup.patch | setup.moat
    assert not (setup.patch & setup.moat)
    # no pockets here, so every moat site is within euclidean distance 3
    for s in setup.moat:
        assert min((s[0] - q[0]) ** 2 + (s[1] - q[1]) ** 2
                   for q in setup.patch) <= 9
    # a tiny patch is dwarfed by the level-1 disks: threshold 1
    assert setup.threshold == 1
    assert setup.levels == 1


def test_make_regions_gap_probe():
    setup = make_regions(square_patch(0, 0, 2), UNIT)
    # patch sites are determined, so the gap stays clear of them
    assert not setup.gap_contains(pt(0, 0))
    # two rows above the patch the sup-ball sees only moat
    assert setup.gap_contains(pt(0, F(9, 2)))
    # past the moat edge the ball reaches an outside site
    assert not setup.gap_contains(pt(0, F(11, 2)))
    q, d2 = setup.closest_gap_point(pt(30, 40))
    assert setup.gap_contains(q)
    assert d2 > 0


def test_make_regions_rejects_bad_patches():
    with pytest.raises(GlueError):
        make_regions([], UNIT)
    with pytest.raises(GlueError):
        make_regions([(0, 0), (5, 5)], UNIT)  # not 4-connected
    ring = [(x, y) for x in range(3) for y in range(3) if (x, y) != (1, 1)]
    with pytest.raises(GlueError, match="holes"):
        make_regions(ring, UNIT)
    with pytest.raises(GlueError, match="window"):
        make_regions(square_patch(0, 0, 1), UNIT,
                     window=Window(100, 100, 200, 200))


def test_make_regions_threshold_override_validation():
    sites = square_patch(0, 0, 1)
    setup = make_regions(sites, UNIT, threshold_override=2)
    assert setup.threshold == 2  # levels + 1: nothing survives wholesale
    with pytest.raises(GlueError):
        make_regions(sites, UNIT, threshold_override=0)
    with pytest.raises(GlueError):
        make_regions(sites, UNIT, threshold_override=3)


def test_make_regions_absorbs_pockets():
    # a 15x15 ring with a one-cell mouth stays simply connected, but the
    # moat dilation seals the mouth and the cavity becomes a pocket
    ring = [(x, y) for x in range(15) for y in range(15)
            if (x in (0, 14) or y in (0, 14)) and (x, y) != (7, 14)]
    setup = make_regions(ring, UNIT)
    assert (7, 7) in setup.moat
    assert setup.zone == setup.patch | setup.moat


# -- identity glue -----------------------------------------------------------


def test_identity_glue_is_pure_keep():
    x, c = dense_pair(UNIT, W30)
    res = glue(x, c, x, c, square_patch(102, 201, 2), UNIT, W30)
    rep = res.report
    assert rep.ok, rep.render()
    admitted = dict(rep.admitted)
    assert admitted == {"deep": 0, "keep": 1, "rebuild": 0, "repair": 0}
    assert rep.writes == 0 and rep.relocations == 0 and rep.double_writes == 0
    # merged equals the base everywhere, and the moat kept no stray values
    for s, comp, v in res.merged.entries:
        assert not res.setup.is_moat(s)
        assert x.get(s, comp) == v
    # determinism: rendering twice is byte-identical
    res2 = glue(x, c, x, c, square_patch(102, 201, 2), UNIT, W30)
    assert res.render() == res2.render()


def test_identity_glue_report_checks_enumerated():
    x, c = dense_pair(UNIT, W30)
    res = glue(x, c, x, c, square_patch(0, 0, 3), UNIT, W30)
    names = [ch.name for ch in res.report.checks]
    assert names == ["restriction-base", "restriction-patch", "writes-in-moat"]
    assert all(ch.ok for ch in res.report.checks)
    assert validate_certificate(res.certificate, UNIT, window=W30).ok
    assert compatible(res.merged, res.certificate, UNIT).ok


# -- relocation --------------------------------------------------------------


def find_witness_anchor(cert):
    for f in cert.frames:
        for b in f.boxes:
            for w in b.witnesses:
                return w.anchor
    raise AssertionError("certificate has no witnesses")


def test_patch_on_witness_anchor_forces_relocation():
    x, c = dense_pair(UNIT, W30)
    anchor = find_witness_anchor(c)
    res = glue(x, c, x, c, square_patch(anchor[0], anchor[1], 2), UNIT, W30)
    rep = res.report
    assert rep.ok, rep.render()
    assert rep.relocations >= 1
    assert rep.writes >= 1
    moved = [w for f in res.certificate.frames for b in f.boxes
             for w in b.witnesses if w.relocated]
    assert moved, "no witness is marked relocated"
    for w in moved:
        # the stored point sits in the gap and its anchor carries the face
        assert res.setup.gap_contains(w.point)
        assert res.setup.is_moat(w.anchor)
        assert any(res.merged.get(w.anchor, comp) is not None
                   for comp in range(UNIT.components()))


def test_relocation_swapped_patch_faces_survive():
    # a genuinely different patch configuration: tie-splits swapped
    x, c = dense_pair(UNIT, W30)
    y = choose_compatible_config(c, UNIT, swap=True)
    assert y.entries != x.entries
    anchor = find_witness_anchor(c)
    res = glue(x, c, y, c, square_patch(anchor[0], anchor[1], 2), UNIT, W30)
    assert res.report.ok, res.report.render()
    for s, comp, v in res.merged.entries:
        if res.setup.is_patch(s):
            assert y.get(s, comp) == v
        elif res.setup.is_outside(s):
            assert x.get(s, comp) == v


# -- rebuild -----------------------------------------------------------------


def segment_patch(x0, y_lo, y_hi):
    return [(x0, y) for y in range(y_lo, y_hi)]


def test_tall_patch_rebuilds_straddling_frame():
    x, c = dense_pair(GLUE1, W30)
    patch = segment_patch(2500, -300, 300)
    res = glue(x, c, x, c, patch, GLUE1, W30)
    rep = res.report
    assert rep.ok, rep.render()
    admitted = dict(rep.admitted)
    assert admitted["rebuild"] >= 1
    # the inflated patch is too big for the level-1 disks to survive: the
    # keep sweep had nothing to do
    assert res.setup.threshold == res.setup.levels + 1
    assert admitted["keep"] == 0
    rebuilt = [e for e in res.events
               if e.step == "rebuild" and e.action == "admit"]
    assert rebuilt
    assert validate_certificate(res.certificate, GLUE1, window=W30).ok


def test_rebuild_places_full_ladders():
    x, c = dense_pair(GLUE1, W30)
    res = glue(x, c, x, c, segment_patch(2500, -300, 300), GLUE1, W30)
    admits = [e for e in res.events
              if e.step == "rebuild" and e.action == "admit"]
    placed = [e for e in res.events
              if e.step == "rebuild" and e.action == "place"]
    # a rebuilt frame carries as many fresh gap witnesses as a dense one
    per_frame = sum(len(b.witnesses) for b in c.frames[0].boxes)
    assert admits and len(placed) == per_frame * len(admits)
    rebuilt_ids = {e.frame_id for e in admits}
    for f in res.certificate.frames:
        if f.frame_id in rebuilt_ids:
            assert sum(len(b.witnesses) for b in f.boxes) == per_frame
            for b in f.boxes:
                for w in b.witnesses:
                    assert res.setup.gap_contains(w.point)


# -- repair ------------------------------------------------------------------


def translate_frame(f, d):
    dx, dy = d
    boxes = []
    for b in f.boxes:
        ws = tuple(dataclasses.replace(
            w, point=pt(w.point.x + dx, w.point.y + dy),
            anchor=(w.anchor[0] + dx, w.anchor[1] + dy)) for w in b.witnesses)
        boxes.append(dataclasses.replace(
            b, center=pt(b.center.x + dx, b.center.y + dy), witnesses=ws))
    return dataclasses.replace(
        f, center=pt(f.center.x + dx, f.center.y + dy), boxes=tuple(boxes))


def repair_instance():
    """A certificate whose origin frame was dragged 3850 east: the drag
    leaves the displaced frame too close to the seam band to keep, deep, or
    rebuild, so the origin probe comes up uncovered and the repair sweep has
    to shift the displaced donor over the hole."""
    c_full = build_dense_certificate(GLUE1, W25)
    origin = [f for f in c_full.frames if f.center == pt(0, 0)]
    assert origin, "expected a frame at the origin"
    rest = tuple(f for f in c_full.frames if f.center != pt(0, 0))
    donor = translate_frame(origin[0], (3850, 0))
    cert = dataclasses.replace(c_full, frames=rest + (donor,))
    cfg = choose_compatible_config(cert, GLUE1)
    return cfg, cert


def test_coverage_hole_triggers_repair():
    x, c = repair_instance()
    assert validate_certificate(c, GLUE1).ok
    # the tall patch pushes the threshold past the only level, so coverage
    # is re-probed; the displaced donor is the only frame near the hole
    res = glue(x, c, x, c, segment_patch(2500, -300, 300), GLUE1, W25)
    rep = res.report
    assert rep.ok, rep.render()
    admitted = dict(rep.admitted)
    assert admitted["repair"] == 1
    assert admitted["keep"] == 0 and admitted["rebuild"] == 0
    targets = [e for e in res.events
               if e.step == "repair" and e.action == "target"]
    assert len(targets) == 1 and "uncovered" in targets[0].detail
    assert validate_certificate(res.certificate, GLUE1, window=W25).ok


# -- entry validation and hard failures ---------------------------------------


def test_glue_rejects_wrong_fill():
    x, c = dense_pair(UNIT, W30)
    bad = dataclasses.replace(x, fill="T")
    with pytest.raises(GlueError, match="fill"):
        glue(bad, c, x, c, square_patch(0, 0, 1), UNIT, W30)


def test_glue_rejects_invalid_certificate():
    # an r/2-violating twin 37 east of an existing frame, with fresh ids so
    # only the separation check can object
    x, c = dense_pair(UNIT, W30)
    shifted = translate_frame(c.frames[0], (37, 0))
    boxes = tuple(
        dataclasses.replace(
            b, box_id=1000 + i, frame_id=999,
            witnesses=tuple(dataclasses.replace(w, witness_id=1000 + 10 * i + j)
                            for j, w in enumerate(b.witnesses)))
        for i, b in enumerate(shifted.boxes))
    squeezed = dataclasses.replace(shifted, frame_id=999, boxes=boxes)
    twin = dataclasses.replace(c, frames=c.frames + (squeezed,))
    with pytest.raises(GlueError, match="certificate invalid"):
        glue(x, twin, x, twin, square_patch(0, 0, 1), UNIT, W30)


def test_glue_rejects_incompatible_config():
    # anchors all present but showing the same face: the frame state is
    # already oriented, which the donor check must refuse
    x, c = dense_pair(UNIT, W30)
    allh = Configuration(
        entries=tuple((s, comp, "H") for (s, comp, _) in x.entries), fill="H")
    with pytest.raises(GlueError, match="compatible"):
        glue(allh, c, x, c, square_patch(0, 0, 1), UNIT, W30)


def test_glue_error_carries_event_log():
    x, c = dense_pair(UNIT, W30)
    bad = dataclasses.replace(x, fill="T")
    try:
        glue(bad, c, x, c, square_patch(0, 0, 1), UNIT, W30)
    except GlueError as e:
        assert isinstance(e.events, tuple)
    else:
        pytest.fail("expected GlueError")
