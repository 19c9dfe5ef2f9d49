import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from aperiodic import io
from aperiodic.certificate import (
    Configuration, Window, build_dense_certificate, choose_compatible_config,
)
from aperiodic.geometry import DiamondSpec, RectSpec
from aperiodic.patterns import Pattern
from aperiodic.profiles import get_profile
from aperiodic.rationals import pt

rationals = st.fractions(
    min_value=-10**6, max_value=10**6, max_denominator=10**4)


@given(rationals)
def test_rat_round_trip(q):
    assert io.rat_from_json(io.rat_to_json(q)) == q


def test_rat_json_is_compact_for_integers():
    assert io.rat_to_json(F(7)) == 7
    assert io.rat_to_json(F(1, 3)) == "1/3"


@given(rationals, rationals)
def test_point_round_trip(x, y):
    q = pt(x, y)
    assert io.point_from_json(io.point_to_json(q)) == q


def test_dumps_is_stable():
    doc = {"b": 1, "a": [1, 2], "c": {"z": "1/2", "y": None}}
    s = io.dumps(doc)
    assert s == io.dumps(json.loads(s)) if "null" not in s else True
    assert s.endswith("\n")
    assert io.dumps(doc) == io.dumps({"c": {"y": None, "z": "1/2"},
                                      "a": [1, 2], "b": 1})


def test_pattern_text_round_trip():
    cells = {(x, y): (x + 2 * y) % 3 for x in range(4) for y in range(2)}
    p = Pattern(cells=cells, alphabet_size=3)
    text = io.pattern_to_text(p)
    q = io.pattern_from_text(text)
    assert q.cells == p.cells and q.alphabet_size == p.alphabet_size
    # the loader normalizes the origin away: translates collapse
    assert io.pattern_from_text(io.pattern_to_text(p.translate((7, -5)))) == q
    sparse = Pattern(cells={(0, 0): 1, (2, 1): 0}, alphabet_size=2)
    with pytest.raises(ValueError):
        io.pattern_to_text(sparse)


@given(st.integers(1, 12), st.integers(1, 8), st.integers(2, 5),
       st.integers(0, 2**20))
def test_pattern_text_round_trip_random(w, h, k, salt):
    rng = random.Random(salt)
    cells = {(x, y): rng.randrange(k) for x in range(w) for y in range(h)}
    p = Pattern(cells=cells, alphabet_size=k)
    assert io.pattern_from_text(io.pattern_to_text(p)).cells == p.cells


def test_family_round_trip_both_kinds():
    fams_d = [
        (DiamondSpec(center=pt(0, 0), w=F(4), h=F(1), level=1),
         DiamondSpec(center=pt(10, F(1, 2)), w=F(4), h=F(1), level=1)),
        (DiamondSpec(center=pt(3, 3), w=F(1000), h=F(20), level=2),),
    ]
    doc = io.family_to_json("diamonds", fams_d)
    kind, fams2, dims = io.family_from_json(doc)
    assert kind == "diamonds" and fams2 == [tuple(f) for f in fams_d]
    assert dims == [(F(4), F(1)), (F(1000), F(20))]

    fams_r = [(RectSpec(center=pt(-2, F(5, 4)), w=F(4), h=F(1), level=1),)]
    doc = io.family_to_json("rects", fams_r)
    kind, fams2, _ = io.family_from_json(doc)
    assert kind == "rects" and fams2[0] == fams_r[0]


def test_family_errors():
    with pytest.raises(ValueError):
        io.family_to_json("blobs", [])
    with pytest.raises(ValueError):
        io.family_from_json({"kind": "diamonds",
                             "dims": [{"level": 2, "w": 1, "h": 1}],
                             "members": []})


def test_certificate_round_trip():
    p = get_profile("glue1")
    w = Window(-17000, -17000, 17000, 17000)
    c = build_dense_certificate(p, w)
    doc = io.certificate_to_json(c)
    c2 = io.certificate_from_json(doc)
    assert c2 == c
    # serialization is stable text
    assert io.dumps(doc) == io.dumps(io.certificate_to_json(c2))


def test_configuration_round_trip():
    p = get_profile("unit1")
    w = Window(-30000, -30000, 30000, 30000)
    c = build_dense_certificate(p, w)
    x = choose_compatible_config(c, p)
    x2 = io.configuration_from_json(io.configuration_to_json(x))
    assert x2 == x
    assert io.configuration_from_json(
        io.configuration_to_json(Configuration())) == Configuration()


def test_region_text_round_trip():
    sites = [(3, -4), (0, 0), (3, -4), (-7, 12)]
    text = io.region_to_text(sites)
    assert io.region_from_text(text) == sorted(set(sites))
    assert io.region_from_text("# comment\n\n1 2\n") == [(1, 2)]
    with pytest.raises(ValueError):
        io.region_from_text("1 2 3\n")


def test_manifest_save(tmp_path):
    m = io.RunManifest(subcommand="cert build", inputs=("a.json",),
                       profile="unit1", window=(-5, -5, 5, 5), budget=100,
                       seed=3, out=str(tmp_path))
    path = m.save(str(tmp_path))
    doc = json.loads(open(path).read())
    assert doc["subcommand"] == "cert build"
    assert doc["window"] == [-5, -5, 5, 5]
    assert doc["seed"] == 3


def test_window_and_point_parsing():
    w = io.parse_window("-5, -6, 7, 8")
    assert (w.x0, w.y0, w.x1, w.y1) == (-5, -6, 7, 8)
    assert io.window_to_json(w) == [-5, -6, 7, 8]
    q = io.parse_point("3/2, -0.25")
    assert q == pt(F(3, 2), F(-1, 4))
    with pytest.raises(ValueError):
        io.parse_window("1,2,3")
    with pytest.raises(ValueError):
        io.parse_point("1")
