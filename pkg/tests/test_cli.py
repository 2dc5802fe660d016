import io
import json
import os
import subprocess
import sys

import pytest

from relkit.cli import run
from relkit.jsonio import read_json
from cli_cases import CASES
from conftest import GOLDEN, HERE

REGEN = os.environ.get("RELKIT_REGEN_GOLDEN") == "1"


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(autouse=True)
def in_tests_dir(monkeypatch):
    monkeypatch.chdir(HERE)


@pytest.mark.parametrize("name,argv,code", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, code):
    got_code, out, _ = invoke(argv + ["--json"])
    assert got_code == code
    json.loads(out)
    path = GOLDEN / f"{name}.json"
    if REGEN:
        path.write_text(out)
    assert path.exists(), f"missing golden file {path.name}; rerun with RELKIT_REGEN_GOLDEN=1"
    assert out == path.read_text()
    # a second run is byte-identical
    assert invoke(argv + ["--json"])[1] == out


def test_summary_goes_to_stderr():
    code, out, err = invoke(["kernel", "decide", "--relation", "fixtures/id3.json"])
    assert code == 0 and err.strip() == "kernel: yes"
    assert json.loads(out) == {"verdict": "yes", "witness": [[0, 0], [1, 1], [2, 2]]}
    assert invoke(["kernel", "decide", "--json", "--relation", "fixtures/id3.json"])[2] == ""


def test_global_flags_before_the_subcommand():
    code, out, _ = invoke(["--json", "--threads", "4", "kernel", "cover", "--graph", "fixtures/triangle_graph.json"])
    assert code == 0 and json.loads(out)["size"] == 1


def test_usage_errors_exit_2():
    assert invoke(["kernel", "decide"])[0] == 2
    assert invoke(["nonsense"])[0] == 2


def test_theta_plus_out_file(tmp_path):
    target = tmp_path / "rep.json"
    code, out, _ = invoke(["construct", "theta-plus", "--json", "--pgroup", "fixtures/trivial_pgroup.json",
                           "--group", "fixtures/z3_group.json", "--injection", "fixtures/trivial_into_z3.json",
                           "--out", str(target)])
    assert code == 0 and json.loads(out)["verdict"] == "ok"
    data = read_json(target)
    assert data["base"] == 9 and len(data["assignment"]) == 7680


def test_theta_plus_needs_injection():
    code, out, _ = invoke(["construct", "theta-plus", "--group", "fixtures/z3_group.json"])
    assert code == 2 and json.loads(out)["verdict"] == "input_error"


def test_structure_output_feeds_back_in(tmp_path):
    code, out, _ = invoke(["construct", "e0", "--json", "--pgroup", "fixtures/trivial_pgroup.json"])
    path = tmp_path / "e0.json"
    path.write_text(out)
    code, out, _ = invoke(["greens", "classify", "--json", "--structure", str(path)])
    assert code == 0 and len(json.loads(out)["H"]) == 7


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "relkit", "kernel", "cover", "--json", "--graph", "fixtures/p3_graph.json"],
                          capture_output=True, text=True, cwd=HERE)
    assert proc.returncode == 0 and json.loads(proc.stdout)["size"] == 2
