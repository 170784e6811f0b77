import csv
import io
import json

import numpy as np
import pytest

from margcone.cli import EVEN_R_FLAG, RADIANT_NOTE, main
from margcone.cone import build_halfspaces, margin_lp
from margcone.margulis import cocycle_from_coords
from margcone.symrep import neutral_vector

PANTS = ["--preset", "three_holed_sphere", "--params", '{"l1": 4, "l2": 4}']


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def mixed_file(tmp_path, pants):
    g1, g2 = pants.generators
    u = [neutral_vector(g1, 1).tolist(), (-neutral_vector(g2, 1)).tolist()]
    return write(tmp_path / "mixed.json", {"u": u})


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_group_command(capsys):
    code, out, _ = run(["group"] + PANTS, capsys)
    data = json.loads(out)
    assert code == 0
    assert data["status"] == "certified"
    assert data["generator_lengths"] == pytest.approx([4.0, 4.0])
    assert data["flags"] == []


def test_group_from_matrices(tmp_path, capsys):
    g = [4.0, 0.0, 0.0, 0.25]
    c, s = np.cos(np.pi / 4), np.sin(np.pi / 4)
    R = np.array([[c, -s], [s, c]])
    h = (R @ np.diag([4.0, 0.25]) @ R.T).ravel().tolist()
    path = write(tmp_path / "g.json", {"generators": [g, h]})
    code, out, _ = run(["group", "--group", path], capsys)
    assert code == 0 and json.loads(out)["margin"] > 0.1


def test_group_rejected_on_math_grounds(tmp_path, capsys):
    e = np.exp(0.05)
    c, s = np.cos(np.pi / 4), np.sin(np.pi / 4)
    R = np.array([[c, -s], [s, c]])
    h = (R @ np.diag([e, 1 / e]) @ R.T).ravel().tolist()
    path = write(tmp_path / "g.json", {"generators": [[e, 0, 0, 1 / e], h]})
    code, _, err = run(["group", "--group", path], capsys)
    assert code == 2 and "may still be Schottky" in err


def test_parse_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["group", "--group", str(bad)], capsys)[0] == 3
    assert run(["group", "--group", str(tmp_path / "missing.json")], capsys)[0] == 3
    assert run(["cone"] + PANTS + ["--L", "20"], capsys)[0] == 3
    assert run(["frobnicate"], capsys)[0] == 3
    assert run(["group"], capsys)[0] == 3
    assert run(["group"] + PANTS + ["--params", "[1]"], capsys)[0] == 3
    assert run(["invariants"] + PANTS, capsys)[0] == 3


def test_cocycle_shape_mismatch_is_rejected(tmp_path, capsys):
    path = write(tmp_path / "u.json", {"u": [[1, 2, 3, 4], [1, 2, 3, 4]]})
    code, _, err = run(["invariants"] + PANTS + ["--cocycle", path], capsys)
    assert code == 2 and "shape" in err


def test_invariants_table(mixed_file, capsys):
    code, out, _ = run(["invariants"] + PANTS + ["--cocycle", mixed_file, "--L", "2"], capsys)
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(rows) == 12
    first = {r["word"]: r for r in rows}
    assert first["a"]["alpha"] == pytest.approx(1.0)
    assert first["a"]["alpha_over_ell"] == pytest.approx(0.25)
    assert first["b"]["alpha"] == pytest.approx(-1.0)


def test_invariants_deterministic_with_and_without_cache(mixed_file, tmp_path, capsys):
    argv = ["invariants"] + PANTS + ["--cocycle", mixed_file, "--L", "6"]
    plain = run(argv, capsys)[1]
    cache = str(tmp_path / "cache")
    cold = run(argv + ["--cache", cache], capsys)[1]
    warm = run(argv + ["--cache", cache], capsys)[1]
    assert plain == cold == warm
    assert list((tmp_path / "cache").iterdir())


def test_output_file(mixed_file, tmp_path, capsys):
    out = tmp_path / "table.jsonl"
    code, stdout, _ = run(["invariants"] + PANTS + ["--cocycle", mixed_file, "--L", "1",
                                                     "--out", str(out)], capsys)
    assert code == 0 and stdout == ""
    assert len(out.read_text().splitlines()) == 4


def test_certify_finds_opposite_signs(mixed_file, capsys):
    code, out, _ = run(["certify"] + PANTS + ["--cocycle", mixed_file, "--L", "2"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["certificate"]["negative"] == "b" and data["certificate"]["positive"] == "a"
    assert abs(data["psi_zero_current"]) < 1e-12
    assert [a["weight"] for a in data["zero_current"]["atoms"]] == pytest.approx([0.5, 0.5])


def test_certify_radiant(tmp_path, capsys):
    path = write(tmp_path / "zero.json", {"u": [[0, 0, 0], [0, 0, 0]]})
    code, out, _ = run(["certify"] + PANTS + ["--cocycle", path], capsys)
    data = json.loads(out)
    assert code == 1 and data["certificate"] is None and data["note"] == RADIANT_NOTE


def test_certify_lp_witness_has_no_certificate(pants, tmp_path, capsys):
    rep = margin_lp(build_halfspaces(pants, 1, 8))
    u = cocycle_from_coords(pants, 1, rep.witness)
    path = write(tmp_path / "w.json", u.to_json())
    code, out, _ = run(["certify"] + PANTS + ["--cocycle", path, "--L", "8"], capsys)
    assert code == 1 and json.loads(out)["certificate"] is None
    assert "note" not in json.loads(out)


def test_cone_command(tmp_path, capsys):
    section = tmp_path / "section.json"
    code, out, _ = run(["cone"] + PANTS + ["--L", "4", "--section", str(section)], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["status"] == "BothFeasible"
    assert data["positive"]["t_star"] == pytest.approx(0.25, abs=1e-8)
    assert data["entries"] <= data["raw_count"]
    assert json.loads(section.read_text())["area"] > 0


def test_even_r_flagged(capsys):
    code, out, _ = run(["cone"] + PANTS + ["--r", "2", "--L", "3"], capsys)
    assert code == 0 and EVEN_R_FLAG in json.loads(out)["flags"]
    assert "cross_section" not in json.loads(out)


def test_report_command(capsys):
    code, out, _ = run(["report"] + PANTS + ["--L", "4"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [int(r["L"]) for r in rows] == [1, 2, 3, 4]
    t = [float(r["t_plus"]) for r in rows]
    assert all(t[i + 1] <= t[i] + 1e-9 for i in range(3))


def test_quad_command(mixed_file, capsys):
    code, out, _ = run(["quad"] + PANTS + ["--cocycle", mixed_file, "--word", "ab",
                                            "--steps", "10000"], capsys)
    data = json.loads(out)
    assert code == 0 and data["abs_err"] < 1e-6


def test_psi_command(mixed_file, tmp_path, capsys):
    cur = write(tmp_path / "mu.json", {"atoms": [{"word": "a", "weight": 1.0}]})
    code, out, _ = run(["psi"] + PANTS + ["--cocycle", mixed_file, "--current", cur], capsys)
    assert code == 0 and json.loads(out)["psi"] == pytest.approx(0.25)


def test_bad_current_weights_rejected(mixed_file, tmp_path, capsys):
    cur = write(tmp_path / "mu.json", {"atoms": [{"word": "a", "weight": 0.5}]})
    assert run(["psi"] + PANTS + ["--cocycle", mixed_file, "--current", cur], capsys)[0] == 2


def test_form_command(capsys):
    code, out, _ = run(["form"] + PANTS + ["--r", "1"], capsys)
    data = json.loads(out)
    assert code == 0 and data["dim"] == 3
    np.testing.assert_allclose(np.array(data["form"]).reshape(3, 3),
                               [[0, 0, -2], [0, 1, 0], [-2, 0, 0]])


def test_r_read_from_group_file(tmp_path, capsys):
    path = write(tmp_path / "g.json", {"preset": "one_holed_torus",
                                       "params": {"l1": 5, "l2": 5}, "r": 3})
    code, out, _ = run(["form", "--group", path], capsys)
    assert code == 0 and json.loads(out)["dim"] == 7
