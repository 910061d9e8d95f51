import json

import pytest

from conftest import cached_random, cached_special
from tverdeg import documents as docs
from tverdeg.cli import main
from tverdeg.experiments import simplex_vertices
from tverdeg.model import BmzCollection


@pytest.fixture
def special_file(tmp_path):
    path = tmp_path / "c0.json"
    docs.write_collection(path, cached_special(2, 3))
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_degree_human(capsys, special_file):
    code, out, _ = run(capsys, "degree", special_file)
    assert code == 0
    lines = dict(line.split("\t", 1) for line in out.splitlines()[:4])
    assert abs(int(lines["degree"])) == 8
    assert lines["hits"] == "8"


def test_degree_json_and_seeds(capsys, special_file):
    code, out, _ = run(capsys, "degree", special_file, "--json")
    base = json.loads(out)
    assert code == 0 and abs(base["degree"]) == 8 and base["residue"] == 2
    degrees = set()
    for seed in (1, 2):
        code, out, _ = run(capsys, "degree", special_file, "--json", "--ray", f"seed={seed}")
        degrees.add(json.loads(out)["degree"])
    assert degrees == {base["degree"]}


def test_threads_env(capsys, special_file, monkeypatch):
    monkeypatch.setenv("TVERDEG_THREADS", "2")
    code, out, _ = run(capsys, "degree", special_file, "--json")
    assert code == 0 and abs(json.loads(out)["degree"]) == 8


def test_parse_errors_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d": 2, "r": 3, "points": [["1/0", "0"]]}')
    assert run(capsys, "degree", bad)[0] == 1
    assert run(capsys, "degree", tmp_path / "missing.json")[0] == 1
    assert run(capsys, "degree")[0] == 1
    assert run(capsys, "degree", bad, "--ray", "sideways")[0] == 1
    dup = docs.collection_to_doc(cached_random(2, 3, 0))
    dup["points"][1] = dup["points"][0]
    bad.write_text(json.dumps(dup))
    code, _, err = run(capsys, "degree", bad)
    assert code == 1 and "distinctness" in err


def degenerate_file(tmp_path):
    pts = [(0, 0), (9, 2), (1, 1), (-3, 7), (2, 2), (6, -5), (4, 11)]
    path = tmp_path / "flat.json"
    docs.write_collection(path, BmzCollection(2, 3, pts))
    return path


def test_general_position_failure_exit_2(capsys, tmp_path):
    path = degenerate_file(tmp_path)
    code, out, _ = run(capsys, "degree", path, "--json")
    assert code == 2
    payload = json.loads(out)
    assert payload["status"] == "not-general" and payload["genpos"]["violations"]
    assert run(capsys, "check", path)[0] == 2


def test_check_ok(capsys, special_file):
    code, out, _ = run(capsys, "check", special_file, "--almost", "--json")
    payload = json.loads(out)
    assert code == 0 and payload["sufficiently_general"] and payload["almost_general"]


def test_special_then_census(capsys, tmp_path):
    path = tmp_path / "s.json"
    assert run(capsys, "special", "--d", 2, "--r", 3, "-o", path)[0] == 0
    code, out, _ = run(capsys, "census", path, "--json")
    payload = json.loads(out)
    assert code == 0 and payload["count"] == 8
    assert payload["class_count"] == 4 and payload["full_class_count"] == 0
    code, out, _ = run(capsys, "census", path)
    assert "tverberg_placements\t8" in out


def test_special_stdout_is_document(capsys):
    code, out, _ = run(capsys, "special", "--d", 1, "--r", 3)
    assert code == 0 and docs.doc_to_collection(json.loads(out)).r == 3


def test_perturb_raw_clusters_then_check(capsys, tmp_path):
    pts = [v for v in simplex_vertices(2) for _ in range(2)] + [(1, 1)]
    raw = tmp_path / "raw.json"
    raw.write_text(json.dumps({"d": 2, "r": 3, "points": [[str(x) for x in p] for p in pts]}))
    # duplicates make the raw file invalid for the checker
    assert run(capsys, "check", raw)[0] == 1
    out_path = tmp_path / "p.json"
    # perturb accepts the raw configuration by parsing without validation
    code, out, err = run(capsys, "perturb", raw, "--eps", "1/100", "--seed", 3, "-o", out_path)
    assert code == 0, err
    assert run(capsys, "check", out_path)[0] == 0


def test_motion_table(capsys, tmp_path, special_file):
    other = tmp_path / "r.json"
    docs.write_collection(other, cached_random(2, 3, 4))
    code, out, _ = run(capsys, "motion", special_file, other, "--steps", 4)
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines()[1:]]
    assert len(rows) == 5 and {row[3] for row in rows if row[3] != "-"} == {"2"}


def test_search_persists_finds(capsys, tmp_path):
    out_dir = tmp_path / "finds"
    code, out, _ = run(
        capsys, "search", "--d", 2, "--r", 4, "--budget", 10, "--seed", 0, "--stop-after", 1, "--out-dir", out_dir, "--json"
    )
    payload = json.loads(out)
    assert code == 0 and payload["finds"]
    trial = payload["finds"][0]["trial"]
    c = docs.read_collection(out_dir / f"find_{trial:06d}.json")
    report = json.loads((out_dir / f"find_{trial:06d}_report.json").read_text())
    assert report["degree"]["degree"] == 0 and report["census"]["count"] > 0
    code, out, _ = run(capsys, "degree", out_dir / f"find_{trial:06d}.json", "--json")
    assert json.loads(out)["degree"] == 0
    assert c.r == 4


def test_solve(capsys, tmp_path):
    path = tmp_path / "colored.json"
    path.write_text(json.dumps({"classes": [[[0, 0], [4, 1]], [[1, 5], [3, -2]], [[6, 3], [-1, 2]]]}))
    code, out, _ = run(capsys, "solve", path, "--json")
    payload = json.loads(out)
    assert code == 0 and len(payload["parts"]) == 2
    path.write_text("{}")
    assert run(capsys, "solve", path)[0] == 1


def test_sign_case(capsys, special_file, tmp_path):
    code, out, _ = run(capsys, "sign-case", special_file, "--case", 1, "--json")
    assert code == 0 and json.loads(out)["case"] == 1
    big = tmp_path / "big.json"
    docs.write_collection(big, cached_special(2, 4))
    assert run(capsys, "sign-case", big, "--case", 1)[0] == 1
