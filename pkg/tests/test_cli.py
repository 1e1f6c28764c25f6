import json
import os
import subprocess
import sys

import pytest

from cmc_atlas.cli import KINDS, main, parse_config


def run(tmp_path, *args):
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def family(tmp_path_factory):
    path = tmp_path_factory.mktemp("fam") / "fam.json"
    assert main(["generate", "helicoidal", "--kappa", "1", "--H", "0.3", "--I", "0.2", "--b", "0.5",
                 "--out", str(path)]) == 0
    return path


def test_generate_rotational_csv(tmp_path):
    out = tmp_path / "cap.csv"
    assert run(tmp_path, "generate", "rotational", "--kappa", -1, "--eps", -1, "--H", -0.5, "--flux", 0,
               "--rho-max", 8, "--out", out) == 0
    data = out.read_bytes()
    assert data.startswith(b"s,rho,t,phi,I_prime\r\n")
    first = data.split(b"\r\n")[1].split(b",")
    assert len(first) == 5


def test_generate_qzero(tmp_path):
    out = tmp_path / "q.csv"
    assert run(tmp_path, "generate", "qzero", "--kappa", 1, "--H", 1, "--sign", -1, "--rho-max", 0.9,
               "--n", 11, "--out", out) == 0
    assert out.read_text().splitlines()[0] == "rho,t,relation"


def test_family_descriptor(family):
    d = json.loads(family.read_text())
    assert d["schema"] == 1


def test_verify_q_passes(family, tmp_path):
    rep = tmp_path / "r.json"
    assert run(tmp_path, "verify", "q", "--family", family, "--grid", "201x65", "--tol", "1e-5",
               "--report", rep) == 0
    r = json.loads(rep.read_text())
    assert r["pass"] is True and r["cr_max"] <= 1e-5


def test_verify_failure_exit_code(family, tmp_path):
    assert run(tmp_path, "verify", "cmc", "--family", family, "--grid", "41x21", "--tol", "1e-15") == 2


def test_usage_errors(tmp_path):
    assert main([]) == 1
    assert main(["verify"]) == 1
    assert main(["verify", "nope"]) == 1
    assert main(["generate", "rotational", "--eps", "0"]) == 1
    assert main(["generate", "rotational", "--I", "0.1", "--flux", "0.2"]) == 1
    assert main(["solve-graph", "--domain", "disc:center=1,r=1"]) == 1
    assert main(["solve-graph", "--domain", "ellipse:a=1"]) == 1
    assert main(["verify", "q", "--family", str(tmp_path / "missing.json")]) == 1


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('schema = 1\ncommand = "bounds"\nkind = "height"\nH = 0.3\ninf_Y = 2.0\nsup_Y = 4.0\n')
    c = parse_config(["bounds", "--config", str(cfg), "--H", "0.5"])
    assert c.kind == "height" and c.get("H") == 0.5 and c.get("inf_Y") == 2.0
    rep = tmp_path / "r.json"
    assert main(["bounds", "--config", str(cfg), "--report", str(rep)]) == 0
    assert json.loads(rep.read_text())["bound"] == pytest.approx(1 / 0.3)


def test_config_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('H = 0.3\nwhatever = 1\n')
    assert main(["bounds", "height", "--config", str(cfg)]) == 1
    cfg.write_text('schema = 2\n')
    assert main(["bounds", "height", "--config", str(cfg)]) == 1
    cfg.write_text('command = "verify"\n')
    assert main(["bounds", "height", "--config", str(cfg)]) == 1


def test_solve_graph_outputs(tmp_path):
    out = tmp_path / "g.json"
    rep = tmp_path / "r.json"
    assert run(tmp_path, "solve-graph", "--kappa", 0, "--H", 0.3, "--domain", "disc:center=3,r=1",
               "--grid", 33, "--out", out, "--report", rep) == 0
    sol = json.loads(out.read_text())
    assert sol["grid"] == [33, 33] and sol["diagnostics"]["converged"]
    r = json.loads(rep.read_text())
    assert {c["check"] for c in r["checks"]} >= {"height", "gradient"}
    obj = (tmp_path / "g.obj").read_text().splitlines()
    assert sum(line.startswith("v ") for line in obj) == 33 * 33
    assert sum(line.startswith("f ") for line in obj) == 2 * 32 * 32


def test_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["solve-graph", "--H", "0.3", "--domain", "disc:center=3,r=1", "--grid", "33"]
    assert main(args + ["--report", str(a)]) == 0
    assert main(args + ["--report", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bounds_area(tmp_path):
    assert main(["bounds", "area", "--H", "0.3", "--domain", "disc:center=3,r=1"]) == 0
    assert main(["bounds", "area", "--H", "2.5", "--domain", "disc:center=3,r=1"]) == 2


def test_verify_integral_checks(tmp_path):
    for kind in ("flux", "minkowski", "angle"):
        assert main(["verify", kind, "--kappa", "-1", "--eps", "-1", "--H", "-0.5", "--s-max", "2"]) == 0


def test_export_formats(tmp_path, family):
    for kind in ("obj", "csv", "json"):
        out = tmp_path / f"p.{kind}"
        assert main(["export", kind, "--family", str(family), "--grid", "11x5", "--out", str(out)]) == 0
        assert out.stat().st_size > 0
    out = tmp_path / "rot.csv"
    assert main(["export", "csv", "--H", "-1", "--grid", "11x5", "--out", str(out)]) == 0
    assert out.read_text().startswith("s,rho,t,phi,I_prime")


def test_deform(tmp_path):
    fam = tmp_path / "flat.json"
    assert main(["generate", "helicoidal", "--kappa", "0", "--H", "0.3", "--I", "0.2", "--b", "0.5",
                 "--out", str(fam)]) == 0
    assert main(["deform", "--family", str(fam), "--m", "0.9"]) == 0
    assert main(["deform", "--family", str(fam), "--m", "0.9", "--b", "0.7"]) == 0


@pytest.mark.parametrize("command", sorted(KINDS))
def test_self_tests(command):
    assert main([command, "--self-test"]) == 0


def test_module_entry_point(tmp_path):
    env = dict(os.environ, CMC_ATLAS_THREADS="1")
    p = subprocess.run([sys.executable, "-m", "cmc_atlas", "bounds", "height", "--H", "0.3",
                        "--inf-Y", "2", "--sup-Y", "4"], capture_output=True, text=True, env=env)
    assert p.returncode == 0 and "PASS" in p.stderr
    env["CMC_ATLAS_THREADS"] = "zero"
    p = subprocess.run([sys.executable, "-m", "cmc_atlas", "bounds", "height", "--H", "0.3",
                        "--inf-Y", "2", "--sup-Y", "4"], capture_output=True, text=True, env=env)
    assert p.returncode == 1
