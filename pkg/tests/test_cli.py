"""Exit codes and artifacts of the command-line front end."""

import json
import os

import pytest

from aperiodic import io
from aperiodic.certificate import Window, build_dense_certificate, choose_compatible_config
from aperiodic.cli import main
from aperiodic.geometry import DiamondSpec, RectSpec
from aperiodic.profiles import get_profile
from aperiodic.rationals import pt
from fractions import Fraction as F


def write_diamond_family(path):
    fams = [
        tuple(DiamondSpec(center=pt(200 * i, 0), w=F(4), h=F(1), level=1)
              for i in range(4)),
        (DiamondSpec(center=pt(100, 30), w=F(1000), h=F(20), level=2),),
    ]
    io.write_text(str(path), io.dumps(io.family_to_json("diamonds", fams)))
    return str(path)


def write_rect_family(path):
    fams = [
        tuple(RectSpec(center=pt(300 * i, 0), w=F(4), h=F(1), level=1)
              for i in range(3)),
    ]
    io.write_text(str(path), io.dumps(io.family_to_json("rects", fams)))
    return str(path)


def write_cert_pair(tmp_path, profile="glue1", window=(-17000, -17000, 17000, 17000)):
    p = get_profile(profile)
    w = Window(*window)
    cert = build_dense_certificate(p, w)
    cfg = choose_compatible_config(cert, p)
    cpath = tmp_path / "cert.json"
    xpath = tmp_path / "config.json"
    io.write_text(str(cpath), io.dumps(io.certificate_to_json(cert)))
    io.write_text(str(xpath), io.dumps(io.configuration_to_json(cfg)))
    return str(cpath), str(xpath)


# -- parser-level behaviour ----------------------------------------------------


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "pattern" in capsys.readouterr().out


def test_usage_error_exits_two(capsys):
    assert main(["game", "solve", "--buckets", "1"]) == 2  # missing --coins
    assert main(["pattern"]) == 2                          # missing subcommand
    assert main(["game", "solve", "--buckets", "0", "--coins", "1"]) == 2


def test_missing_file_exits_two(capsys):
    assert main(["pattern", "check", "--file", "/nonexistent.txt", "--n", "2"]) == 2
    err = capsys.readouterr().err
    assert "error" in err


# -- game ------------------------------------------------------------------


def test_game_solve_verdicts(capsys):
    assert main(["game", "solve", "--buckets", "1", "--coins", "2"]) == 0
    out = capsys.readouterr().out
    assert "UNORIENTABLE" in out
    assert main(["game", "solve", "--buckets", "2", "--coins", "3"]) == 0
    assert "ORIENTABLE" in capsys.readouterr().out


def test_game_solve_json(capsys):
    assert main(["game", "solve", "--buckets", "2", "--coins", "3", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"] == "ORIENTABLE"
    assert doc["moves"]


def test_game_greedy_boundary(capsys):
    assert main(["game", "greedy", "--buckets", "3", "--coins", "7", "--quiet"]) == 0
    assert main(["game", "greedy", "--buckets", "3", "--coins", "8", "--quiet"]) == 1


def test_game_table(capsys):
    assert main(["game", "table", "--kmax", "2", "--nmax", "4"]) == 0
    out = capsys.readouterr().out
    assert "k=" in out or "n=" in out


# -- pattern ---------------------------------------------------------------


def test_pattern_construct_writes_stage_files(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["pattern", "construct", "--depth", "1",
                 "--out", str(out)]) == 0
    names = sorted(os.listdir(out))
    assert "manifest.json" in names
    assert "report.txt" in names
    assert any(n.startswith("stage1_") for n in names)
    man = json.loads(open(out / "manifest.json").read())
    assert man["subcommand"] == "pattern construct"


def test_pattern_check_round_trip(tmp_path, capsys):
    out = tmp_path / "run"
    main(["pattern", "construct", "--depth", "1", "--out", str(out), "--quiet"])
    square = out / "stage1_square.txt"
    assert main(["pattern", "check", "--file", str(square), "--n", "1"]) == 0
    assert "aperiodic pair" in capsys.readouterr().out


# -- hull / safe / geom -------------------------------------------------------


def test_hull_build_with_svg(tmp_path, capsys):
    fam = write_diamond_family(tmp_path / "d.json")
    svg_path = tmp_path / "hull.svg"
    assert main(["hull", "build", "--file", fam, "--svg", str(svg_path)]) == 0
    out = capsys.readouterr().out
    assert "region(s)" in out
    assert open(svg_path).read().startswith("<svg")


def test_hull_rejects_rect_family(tmp_path, capsys):
    fam = write_rect_family(tmp_path / "r.json")
    assert main(["hull", "build", "--file", fam]) == 2


def test_safe_query_and_path(tmp_path, capsys):
    fam = write_rect_family(tmp_path / "r.json")
    assert main(["safe", "query", "--file", fam, "--point", "150,300"]) == 0
    assert "safe" in capsys.readouterr().out
    assert main(["safe", "query", "--file", fam, "--point", "0,0"]) == 1
    assert main(["safe", "path", "--file", fam, "--point", "150,300",
                 "--extent", "500", "--quiet"]) == 0
    assert main(["safe", "path", "--file", fam, "--point", "0,0",
                 "--extent", "500", "--quiet"]) == 1
    assert main(["safe", "path", "--file", fam, "--point", "150,300",
                 "--extent", "junk"]) == 2


def test_geom_check_verdicts(tmp_path, capsys):
    good = write_diamond_family(tmp_path / "good.json")
    assert main(["geom", "check", "--file", good]) == 0
    assert "hold" in capsys.readouterr().out
    crowded = [
        (DiamondSpec(center=pt(0, 0), w=F(4), h=F(1), level=1),
         DiamondSpec(center=pt(2, 0), w=F(4), h=F(1), level=1)),
    ]
    bad = tmp_path / "bad.json"
    io.write_text(str(bad), io.dumps(io.family_to_json("diamonds", crowded)))
    assert main(["geom", "check", "--file", str(bad)]) == 1


# -- cert ------------------------------------------------------------------


def test_cert_pipeline(tmp_path, capsys):
    cert_out = tmp_path / "cert.json"
    assert main(["cert", "build", "--profile", "glue1",
                 "--window=-17000,-17000,17000,17000",
                 "--out", str(cert_out), "--quiet"]) == 0
    assert os.path.exists(tmp_path / "manifest.json")

    cfg_out = tmp_path / "config.json"
    assert main(["cert", "config", "--cert", str(cert_out),
                 "--profile", "glue1", "--out", str(cfg_out), "--quiet"]) == 0

    assert main(["cert", "validate", "--cert", str(cert_out),
                 "--profile", "glue1",
                 "--window=-17000,-17000,17000,17000", "--quiet"]) == 0
    assert main(["cert", "compat", "--cert", str(cert_out),
                 "--config", str(cfg_out), "--profile", "glue1",
                 "--quiet"]) == 0
    assert main(["cert", "extract", "--cert", str(cert_out),
                 "--config", str(cfg_out), "--profile", "glue1",
                 "--n", "2"]) == 0
    assert "congruent mod 2" in capsys.readouterr().out


def test_cert_validate_fails_on_separation(tmp_path, capsys):
    import dataclasses
    p = get_profile("unit1")
    w = Window(-30000, -30000, 30000, 30000)
    cert = build_dense_certificate(p, w)
    f = cert.frames[0]
    boxes = tuple(
        dataclasses.replace(
            b, box_id=100 + i, frame_id=99,
            witnesses=tuple(dataclasses.replace(wi, witness_id=200 + 10 * i + j)
                            for j, wi in enumerate(b.witnesses)))
        for i, b in enumerate(f.boxes))
    twin = dataclasses.replace(f, frame_id=99, boxes=boxes,
                               center=pt(f.center.x + 37, f.center.y))
    bad = dataclasses.replace(cert, frames=cert.frames + (twin,))
    path = tmp_path / "bad.json"
    io.write_text(str(path), io.dumps(io.certificate_to_json(bad)))
    assert main(["cert", "validate", "--cert", str(path),
                 "--profile", "unit1", "--quiet"]) == 1


def test_cert_extract_unmixed_exits_one(tmp_path, capsys):
    cpath, xpath = write_cert_pair(
        tmp_path, "unit1", (-30000, -30000, 30000, 30000))
    assert main(["cert", "extract", "--cert", cpath, "--config", xpath,
                 "--profile", "unit1", "--n", "2"]) == 1


# -- glue ------------------------------------------------------------------


def test_glue_run_identity(tmp_path, capsys):
    cpath, xpath = write_cert_pair(
        tmp_path, "unit1", (-30000, -30000, 30000, 30000))
    region = tmp_path / "region.txt"
    sites = [(x, y) for x in range(100, 105) for y in range(200, 203)]
    io.write_text(str(region), io.region_to_text(sites))
    out = tmp_path / "glue"
    code = main(["glue", "run", "--x", xpath, "--cx", cpath,
                 "--y", xpath, "--cy", cpath, "--region", str(region),
                 "--profile", "unit1",
                 "--window=-30000,-30000,30000,30000",
                 "--out", str(out), "--svg", "--quiet"])
    assert code == 0
    names = sorted(os.listdir(out))
    assert names == ["certificate.json", "glue.svg", "manifest.json",
                     "merged.json", "report.txt", "steps.log"]
    report = open(out / "report.txt").read()
    assert "overall: ok" in report
    # reruns are byte-identical
    out2 = tmp_path / "glue2"
    main(["glue", "run", "--x", xpath, "--cx", cpath, "--y", xpath,
          "--cy", cpath, "--region", str(region), "--profile", "unit1",
          "--window=-30000,-30000,30000,30000", "--out", str(out2), "--quiet"])
    assert open(out2 / "report.txt").read() == report
    assert (open(out2 / "merged.json").read()
            == open(out / "merged.json").read())


def test_glue_run_bad_region_exits_one(tmp_path, capsys):
    cpath, xpath = write_cert_pair(
        tmp_path, "unit1", (-30000, -30000, 30000, 30000))
    region = tmp_path / "region.txt"
    io.write_text(str(region), "0 0\n5 5\n")   # not 4-connected
    out = tmp_path / "glue"
    code = main(["glue", "run", "--x", xpath, "--cx", cpath,
                 "--y", xpath, "--cy", cpath, "--region", str(region),
                 "--profile", "unit1",
                 "--window=-30000,-30000,30000,30000",
                 "--out", str(out), "--quiet"])
    assert code == 1
    assert os.path.exists(out / "error.txt")
