import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from feasik import cli, solve
from feasik.config import (build_problem, build_run_config, emit_document,
                           parse_document, problem_doc)
from feasik.errors import ConfigError


def two_halfspace_doc(**overrides):
    doc = {
        "problem": {
            "dim": 2,
            "outer": {"type": "whole_space"},
            "constraints": [
                {"type": "halfspace", "a": [1.0, 0.0], "b": 0.0},
                {"type": "halfspace", "a": [0.0, 1.0], "b": 0.0},
            ],
            "interior": {"z": [-3.0, -3.0], "R": 1.0},
        },
        "control": {"kind": "cyclic", "order": [0, 1]},
        "relaxation": {"kind": "constant", "alpha": 1.0},
        "overrelaxation": {"kind": "harmonic"},
        "phi": "one",
        "weights": {"kind": "uniform_active"},
        "counter_mode": "bracketed",
        "x0": [1.0, 1.0],
        "max_iter": 1000,
    }
    doc.update(overrides)
    return doc


def a1_doc(n=400):
    """The alternating counterexample expressed as a finite explicit schedule."""
    values = [1.0 / (k + 1) if k % 2 == 0 else 2.0 ** -k for k in range(n)]
    return two_halfspace_doc(
        overrelaxation={"kind": "list", "values": values, "divergent_sum": True},
        relaxation={"kind": "constant", "alpha": 0.5},
        counter_mode="raw",
        max_iter=n,
    )


def test_round_trip_parse_emit():
    docs = [
        two_halfspace_doc(),
        a1_doc(50),
        two_halfspace_doc(control={"kind": "random_sets", "seed": 7,
                                   "atoms": [{"indices": [0], "p": 0.25},
                                             {"indices": [0, 1], "p": 0.75}]}),
        two_halfspace_doc(phi="subgrad_norm", problem={
            "dim": 1,
            "outer": {"type": "box", "lo": [-5.0], "hi": [5.0]},
            "constraints": [
                {"type": "sublevel", "f": {"kind": "quad_coord", "axis": 0, "c": 1.0}},
                {"type": "sublevel", "f": {"kind": "affine", "a": [1.0], "b": 0.1},
                 "cutter": "metric"},
                {"type": "ball", "center": [0.0], "radius": 2.0},
            ]}, x0=[3.0]),
    ]
    for doc in docs:
        assert parse_document(emit_document(doc)) == doc


def test_problem_doc_round_trip():
    doc = two_halfspace_doc()["problem"]
    assert problem_doc(build_problem(doc)) == doc


def test_build_and_solve_from_document(tmp_path):
    cfg = build_run_config(two_halfspace_doc())
    result = solve(cfg)
    assert result.feasible


def test_malformed_json_diagnostic():
    with pytest.raises(ConfigError, match="line"):
        parse_document("{ nope }")
    with pytest.raises(ConfigError, match="missing"):
        build_run_config({"problem": {"dim": 1, "constraints": []}})


def run_cli(args, tmp_path, env_extra=None):
    env = dict(os.environ)
    env.pop("FEASIK_SEED", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "feasik.cli", *args],
                          capture_output=True, text=True, cwd=tmp_path, env=env)


def write_doc(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(emit_document(doc))
    return str(path)


def test_cli_solve_feasible(tmp_path):
    path = write_doc(tmp_path, two_halfspace_doc())
    out = run_cli(["solve", "--config", path, "--output", "trace.csv"], tmp_path)
    assert out.returncode == 0
    assert "status=feasible" in out.stdout and "corrections=" in out.stdout
    header = (tmp_path / "trace.csv").read_text().splitlines()[0]
    assert header.startswith("k,bracket_k,alpha,r,active,violated,step_norm,feasible")


def test_cli_solve_a1_raw_hits_budget(tmp_path):
    path = write_doc(tmp_path, a1_doc())
    out = run_cli(["solve", "--config", path], tmp_path)
    assert out.returncode == 2
    assert "status=max_iter" in out.stdout


def test_cli_bad_relaxation_exits_one(tmp_path):
    doc = two_halfspace_doc(relaxation={"kind": "constant", "alpha": 2.5})
    path = write_doc(tmp_path, doc)
    out = run_cli(["solve", "--config", path], tmp_path)
    assert out.returncode == 1
    assert "relaxation outside (0,2]" in out.stderr


def test_cli_validate(tmp_path):
    path = write_doc(tmp_path, two_halfspace_doc())
    out = run_cli(["validate", "--config", path], tmp_path)
    assert out.returncode == 0 and out.stdout.startswith("OK dim=2 m=2")
    bad = write_doc(tmp_path, {"problem": {}}, "bad.json")
    assert run_cli(["validate", "--config", bad], tmp_path).returncode == 1


def test_cli_certify(tmp_path):
    path = write_doc(tmp_path, two_halfspace_doc())
    out = run_cli(["certify", "--config", path, "--output", "cert.json"], tmp_path)
    assert out.returncode == 0
    assert "violations=0" in out.stdout
    report = json.loads((tmp_path / "cert.json").read_text())
    assert report["certificate"]["violations"] == []


def test_cli_reproduce_a1(tmp_path):
    out = run_cli(["reproduce", "a1-bracketed"], tmp_path)
    assert out.returncode == 0 and "PASS" in out.stdout


def test_cli_seed_overrides(tmp_path):
    doc = two_halfspace_doc(control={"kind": "random_sets", "seed": 1,
                                     "atoms": [{"indices": [0], "p": 0.5},
                                               {"indices": [1], "p": 0.5}]},
                            x0=[2.0, 1.5])
    path = write_doc(tmp_path, doc)
    base = run_cli(["solve", "--config", path, "--output", "t1.csv"], tmp_path)
    flag = run_cli(["solve", "--config", path, "--output", "t2.csv", "--seed", "1"],
                   tmp_path)
    env = run_cli(["solve", "--config", path, "--output", "t3.csv"], tmp_path,
                  env_extra={"FEASIK_SEED": "1"})
    assert base.returncode == flag.returncode == env.returncode == 0
    t1 = (tmp_path / "t1.csv").read_text()
    assert t1 == (tmp_path / "t2.csv").read_text() == (tmp_path / "t3.csv").read_text()
    other = run_cli(["solve", "--config", path, "--output", "t4.csv",
                     "--seed", "999"], tmp_path)
    assert other.returncode in (0, 2)  # different draws may differ in length


def sweep_doc():
    return {
        "base": {
            "problem": two_halfspace_doc()["problem"],
            "relaxation": {"kind": "constant", "alpha": 1.0},
            "overrelaxation": {"kind": "harmonic"},
            "weights": {"kind": "uniform_active"},
            "counter_mode": "bracketed",
            "max_iter": 1000,
        },
        "instances": [{"x0": [1.0, 1.0]}, {"x0": [3.0, -1.0]}],
        "controls": [{"kind": "cyclic", "order": [0, 1]},
                     {"kind": "remotest"},
                     {"kind": "random_sets", "seed": 5,
                      "atoms": [{"indices": [0], "p": 0.5},
                                {"indices": [1], "p": 0.5}]}],
        "phis": ["one"],
    }


def test_cli_sweep_deterministic(tmp_path):
    path = write_doc(tmp_path, sweep_doc(), "grid.json")
    out1 = run_cli(["sweep", "--config", path, "--output", "s1.csv"], tmp_path)
    out2 = run_cli(["sweep", "--config", path, "--output", "s2.csv"], tmp_path)
    assert out1.returncode == 0 and out2.returncode == 0
    s1 = (tmp_path / "s1.csv").read_text()
    assert s1 == (tmp_path / "s2.csv").read_text()
    lines = s1.strip().splitlines()
    assert lines[0] == "instance,control,phi,overrelaxation,k_feasible,corrections,wall_time"
    assert len(lines) == 1 + 2 * 3
    assert all(line.split(",")[4] != "MAX" for line in lines[1:])


def test_cli_sweep_parallel_matches_serial(tmp_path):
    path = write_doc(tmp_path, sweep_doc(), "grid.json")
    a = run_cli(["sweep", "--config", path, "--output", "a.csv"], tmp_path)
    b = run_cli(["sweep", "--config", path, "--output", "b.csv", "--jobs", "2"],
                tmp_path)
    assert a.returncode == b.returncode == 0
    assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()


def test_cli_sweep_empty_grid(tmp_path):
    doc = sweep_doc()
    doc["instances"] = []
    path = write_doc(tmp_path, doc, "grid.json")
    out = run_cli(["sweep", "--config", path], tmp_path)
    assert out.returncode == 1
    assert "empty sweep grid" in out.stderr


def test_cli_missing_file(tmp_path):
    out = run_cli(["solve", "--config", "missing.json"], tmp_path)
    assert out.returncode == 1
