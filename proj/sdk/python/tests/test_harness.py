# Copyright 2026 The commbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Drives the compiled harness against SDK runners. Skipped when the
commbench binary has not been built."""

import json
import os
import pathlib
import subprocess
import sys
import textwrap

import pytest

REPO = pathlib.Path(__file__).resolve().parents[3]
BINARY = pathlib.Path(os.environ.get("COMMBENCH_BIN", REPO / "build/tools/commbench"))

pytestmark = pytest.mark.skipif(not BINARY.exists(), reason=f"{BINARY} not built")


def commbench(*args, cwd=REPO):
    return subprocess.run([str(BINARY), *map(str, args)], capture_output=True, text=True,
                          cwd=cwd, timeout=300)


def test_example_adapter_passes_validate_runner():
    run = commbench("validate-runner", "sdk/python/examples/feature_kmeans.json")
    assert run.returncode == 0, run.stdout + run.stderr
    for phase in ("handshake", "round-trip", "determinism", "failure-injection"):
        assert f"PASS {phase}" in run.stdout


def cube_values(path):
    lines = pathlib.Path(path).read_text().splitlines()
    start = next(i for i, l in enumerate(lines) if l.startswith("cells ")) + 1
    count = int(lines[start - 1].split()[1])
    return [l.split()[3] for l in lines[start:start + count]]


def test_oracle_adapter_scores_perfect_f1_through_protocol(tmp_path):
    script = tmp_path / "oracle.py"
    script.write_text(textwrap.dedent(f"""
        import sys
        sys.path.insert(0, {str(REPO / "sdk/python")!r})
        from commbench_runner import ModelAdapter, serve
        serve(ModelAdapter(name="oracle", train=lambda g, p, s, b, sp: g.labels))
    """))
    spec = tmp_path / "oracle.json"
    spec.write_text(json.dumps({"name": "oracle", "kind": "external",
                                "launch": [sys.executable, str(script)],
                                "defaults": {"unused": 0}}))
    conf = tmp_path / "oracle.conf"
    conf.write_text(
        "mode = default\n"
        "dataset = planted:tiny nodes=60 blocks=3 p_in=0.3 p_out=0.05 feature_dim=4 seed=5\n"
        f"runner = {spec}\n"
        "metrics = f1, nmi\n"
        "seeds = 1, 2, 3\n")
    run = commbench("run", conf, "-o", tmp_path / "oracle.cube", "-q")
    assert run.returncode == 0, run.stdout + run.stderr
    values = cube_values(tmp_path / "oracle.cube")
    assert len(values) == 6
    assert all(float(v) == 1.0 for v in values), values


def test_fetch_script_reads_a_local_source_tree(tmp_path):
    src = tmp_path / "src" / "new_data" / "texas"
    src.mkdir(parents=True)
    (src / "out1_node_feature_label.txt").write_text(
        "node_id\tfeature\tlabel\n0\t1,0,0\t2\n1\t0,1,0\t0\n2\t0,0,1\t4\n")
    (src / "out1_graph_edges.txt").write_text("node_id\tnode_id\n0\t1\n1\t0\n1\t2\n")
    run = subprocess.run([sys.executable, str(REPO / "tools/fetch_datasets.py"), "--dest",
                          tmp_path / "data", "--source", tmp_path / "src", "texas"],
                         capture_output=True, text=True, timeout=60)
    assert run.returncode == 0, run.stderr
    stats = commbench("stats", tmp_path / "data" / "texas")
    assert stats.returncode == 0, stats.stderr
    assert "nodes=3\n" in stats.stdout and "edges=3\n" in stats.stdout
    assert "classes=5\n" in stats.stdout


def test_fetch_failure_exits_three(tmp_path):
    run = subprocess.run([sys.executable, str(REPO / "tools/fetch_datasets.py"), "--dest",
                          tmp_path, "--source", tmp_path / "missing", "cornell"],
                         capture_output=True, text=True, timeout=60)
    assert run.returncode == 3
