import json
import os
import re
import subprocess
import sys

import jsonschema
import pytest
import yaml

BIN = os.environ["DESSEC_BIN"]
ROOT = os.environ["DESSEC_ROOT"]
MODELS = os.path.join(ROOT, "models")

with open(os.path.join(ROOT, "schemas", "verdict.schema.json")) as f:
    SCHEMA = json.load(f)


def run(*args):
    return subprocess.run([BIN, *map(str, args)], capture_output=True, text=True, timeout=120)


def model(name):
    return os.path.join(MODELS, name)


@pytest.fixture(scope="module")
def traffic_supervisor(tmp_path_factory):
    out = tmp_path_factory.mktemp("traffic") / "supervisor.yaml"
    r = run("synthesize", model("traffic_plant.yaml"), model("traffic_spec.yaml"), "--out", out)
    assert r.returncode == 0, r.stderr
    return out


def build(tmp_path, name, mode, vulnerable, supervisor=None, plant=None):
    out = tmp_path / f"{name}_{mode}.yaml"
    r = run("build", plant or model(f"{name}_plant.yaml"), supervisor or model(f"{name}_supervisor.yaml"),
            "--mode", mode, "--vulnerable", vulnerable, "--out", out)
    assert r.returncode == 0, r.stderr
    return out


def check(path, method="all"):
    r = run("check", path, "--method", method)
    doc = json.loads(r.stdout) if r.stdout.strip() else None
    if doc is not None:
        jsonschema.validate(doc, SCHEMA)
    return r, doc


def test_build_ex1_has_four_states(tmp_path):
    doc = yaml.safe_load(build(tmp_path, "ex1", "ae", "b").read_text())
    assert doc["mode"] == "ae"
    assert doc["vulnerable"] == ["b"]
    assert doc["tool_version"]
    assert len(doc["states"]) == 4


def test_build_rejects_empty_vulnerable_set():
    r = run("build", model("ex1_plant.yaml"), model("ex1_supervisor.yaml"), "--mode", "ae", "--vulnerable", "")
    assert r.returncode == 2
    assert "vulnerable set empty" in r.stderr


def test_build_rejects_uncontrollable_actuator():
    r = run("build", model("ex1_plant.yaml"), model("ex1_supervisor.yaml"), "--mode", "ae", "--vulnerable", "a")
    assert r.returncode == 2


def test_build_reports_line_of_bad_input(tmp_path):
    lines = open(model("ex1_plant.yaml")).read().replace('event: "b"', 'event: "zz"').splitlines()
    line = 1 + next(i for i, l in enumerate(lines) if '"zz"' in l)
    bad = tmp_path / "bad.yaml"
    bad.write_text("\n".join(lines) + "\n")
    r = run("build", bad, model("ex1_supervisor.yaml"), "--mode", "ae", "--vulnerable", "b")
    assert r.returncode == 2
    assert f"bad.yaml:{line}:" in r.stderr


def test_check_ex1_unsafe(tmp_path):
    path = build(tmp_path, "ex1", "ae", "b")
    for method in ["diagnoser", "verifier", "oracle", "all"]:
        r, doc = check(path, method)
        assert r.returncode == 1
    r, doc = check(path, "diagnoser")
    assert doc["condition"] == "uncontrollable-unsafe"
    assert doc["x_uc"] == ["(2,3)", "(2,4)"]
    assert doc["counterexample"] == ["a", "b#a", "c"]


def test_check_small_fixtures(tmp_path):
    assert check(build(tmp_path, "ex4", "se", "b"))[0].returncode == 1
    assert check(build(tmp_path, "ex6", "si", "b"))[0].returncode == 1
    assert check(build(tmp_path, "blocking", "se", "b"))[0].returncode == 0


def test_check_traffic_se_safe_with_deadlocks(tmp_path, traffic_supervisor):
    path = build(tmp_path, "traffic", "se", "a3,b3", traffic_supervisor)
    r, doc = check(path)
    assert r.returncode == 0
    assert doc["agree"] is True
    warning = next(l for l in r.stderr.splitlines() if "deadlock" in l)
    assert sorted(re.findall(r"\(\d,\d\)", warning)) == ["(0,3)", "(3,0)", "(3,5)", "(5,3)"]


def test_check_traffic_ae_and_si_unsafe(tmp_path, traffic_supervisor):
    ae = build(tmp_path, "traffic", "ae", "a2,b2", traffic_supervisor)
    si = build(tmp_path, "traffic", "si", "a4,b4", traffic_supervisor)
    assert check(ae)[0].returncode == 1
    assert check(si)[0].returncode == 1


def test_check_corrupt_file(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("format: [\n")
    r = run("check", bad)
    assert r.returncode == 2
    assert run("check", tmp_path / "missing.yaml").returncode == 2


def test_check_unknown_method(tmp_path):
    assert run("check", build(tmp_path, "ex1", "ae", "b"), "--method", "guess").returncode == 2


def test_export_ex1_plant():
    r = run("export", model("ex1_plant.yaml"), "--format", "dot")
    assert r.returncode == 0
    nodes = re.findall(r'^  "[^"]+" \[shape=([^\]]+)\];$', r.stdout, re.M)
    edges = re.findall(r'^  "[^"]+" -> "[^"]+"', r.stdout, re.M)
    assert len(nodes) == 4 and len(edges) == 3
    assert nodes.count("box") == 1
    assert '"4" [shape=box]' in r.stdout
    assert "doublecircle" not in r.stdout
    assert r.stdout == run("export", model("ex1_plant.yaml")).stdout


def test_export_traffic_si_dashes_insertions(tmp_path, traffic_supervisor):
    r = run("export", build(tmp_path, "traffic", "si", "a4,b4", traffic_supervisor))
    assert r.returncode == 0
    assert re.search(r'label="b4#i", style=dashed', r.stdout)


def simulate(path, *args):
    r = run("simulate", path, *args)
    return r, [json.loads(l) for l in r.stdout.splitlines()]


def test_simulate_ex1_all_out(tmp_path):
    r, log = simulate(build(tmp_path, "ex1", "ae", "b"), "--policy", "all-out", "--seed", 3)
    assert r.returncode == 0
    assert log[-1]["plant"] == "4" and log[-1]["safe_mode"] is True
    attack = next(i for i, e in enumerate(log) if e["event"] == "b#a")
    assert all(e["safe_mode"] for e in log[attack:])


def test_simulate_max_steps_zero(tmp_path):
    r, log = simulate(build(tmp_path, "ex1", "ae", "b"), "--max-steps", 0)
    assert len(log) == 1 and log[0]["step"] == 0 and log[0]["event"] is None


def test_simulate_random_zero_never_attacks(tmp_path, traffic_supervisor):
    path = build(tmp_path, "traffic", "ae", "a2,b2", traffic_supervisor)
    for seed in range(5):
        r, log = simulate(path, "--policy", "random:0.0", "--seed", seed)
        assert r.returncode == 0
        assert not any("#" in (e["event"] or "") for e in log)


def test_simulate_script_file(tmp_path):
    script = tmp_path / "script.txt"
    script.write_text("pass\n")
    _, log = simulate(build(tmp_path, "ex1", "ae", "b"), "--policy", script)
    assert [e["plant"] for e in log] == ["1", "2"]


def test_simulate_unknown_policy(tmp_path):
    path = build(tmp_path, "ex1", "ae", "b")
    assert run("simulate", path, "--policy", "sometimes").returncode == 2
    assert run("simulate", path, "--policy", "random:2").returncode == 2


def test_synthesize_traffic_avoids_collisions(traffic_supervisor):
    doc = yaml.safe_load(open(traffic_supervisor))
    assert doc["initial"] == "0"
    assert {e["name"] for e in doc["events"]} == {f"{v}{i}" for v in "ab" for i in range(1, 6)}


def test_synthesize_spec_equal_to_plant(tmp_path):
    out = tmp_path / "sup.yaml"
    assert run("synthesize", model("ex1_plant.yaml"), model("ex1_plant.yaml"), "--out", out).returncode == 0
    doc = yaml.safe_load(out.read_text())
    assert len(doc["states"]) == 4 and len(doc["transitions"]) == 3


def test_synthesize_refuses_unobservable_spec():
    r = run("synthesize", model("unobservable_plant.yaml"), model("unobservable_spec.yaml"))
    assert r.returncode == 1
    w = json.loads(r.stdout)
    assert w["event"] == "s" and w["s1"] != w["s2"]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
