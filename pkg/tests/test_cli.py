import csv
import json

import pytest

from jostpole import cli
from jostpole.cli import CSV_HEADERS, main


def _json(path):
    return json.loads(path.read_text())


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def _cfg(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


@pytest.fixture(scope="module")
def ep_cfg(tmp_path_factory, ep):
    # pin the EP so later commands skip the search
    d = tmp_path_factory.mktemp("cfg")
    p = d / "ep.json"
    p.write_text(json.dumps({"ep": {"d": ep.d_star, "v3": ep.v3_star, "k": [ep.k_d.real, ep.k_d.imag]},
                             "surface": {"grid": [9, 9]}, "section": {"n": 41},
                             "loop": {"samples_per_turn": 64}}))
    return str(p)


def test_doublet(tmp_path):
    out = tmp_path / "d.json"
    assert main(["doublet", "--out", str(out)]) == 0
    rep = _json(out)
    assert rep["count"] == 2 and rep["winding_count"] == 2


def test_empty_window(tmp_path):
    cfg = _cfg(tmp_path, {"window": {"re_min": 0.1, "re_max": 0.3, "im_min": -0.05, "im_max": 0.0}})
    out = tmp_path / "d.json"
    assert main(["doublet", "--config", cfg, "--out", str(out)]) == 0
    assert _json(out)["count"] == 0


def test_ep_needs_a_doublet(tmp_path):
    cfg = _cfg(tmp_path, {"window": {"re_min": 0.1, "re_max": 0.3, "im_min": -0.05, "im_max": 0.0}})
    assert main(["ep", "--config", cfg, "--out", str(tmp_path / "e.json")]) == 1


def test_unfold(tmp_path, ep_cfg, coeffs):
    out = tmp_path / "u.json"
    assert main(["unfold", "--config", ep_cfg, "--out", str(out)]) == 0
    co = _json(out)["coefficients"]
    assert set(co) >= {"c1", "c2", "d1", "d2", "xi_hat0", "xi_hat0_k"}


def test_surface_deterministic(tmp_path, ep_cfg):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["surface", "--config", ep_cfg, "--out", str(a)]) == 0
    assert main(["surface", "--config", ep_cfg, "--out", str(b), "--threads", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _rows(a)
    assert rows[0] == CSV_HEADERS["surface"] and len(rows) == 82


def test_twelve_significant_digits(tmp_path, ep_cfg):
    out = tmp_path / "s.csv"
    assert main(["section", "--config", ep_cfg, "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == CSV_HEADERS["section"] and len(rows) == 42
    for cell in rows[1][:3]:
        mant = cell.split("e")[0].replace("-", "").replace(".", "").lstrip("0")
        assert len(mant) <= 12
    assert cli.fmt(1 / 3) == "0.333333333333"


def test_trajectory(tmp_path, ep_cfg):
    out = tmp_path / "t.csv"
    assert main(["trajectory", "--config", ep_cfg, "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == CSV_HEADERS["trajectory"]
    assert {r[3] for r in rows[1:]} <= {"1", "2"} or len({r[3] for r in rows[1:]}) == 2


def test_loop_writes_csv_and_report(tmp_path, ep_cfg):
    out = tmp_path / "loop.csv"
    assert main(["loop", "--config", ep_cfg, "--out", str(out)]) == 0
    assert _rows(out)[0] == CSV_HEADERS["loop"]
    assert _json(tmp_path / "loop.json")["permutation"] == "swap"


def test_validate(tmp_path):
    out = tmp_path / "v.txt"
    assert main(["validate", "--out", str(out)]) == 0
    assert "FAIL" not in out.read_text()


def test_validate_failure_exit(tmp_path, monkeypatch):
    import jostpole.validation as val

    monkeypatch.setattr(val, "run_checks", lambda cfg: [("forced", False, "x")])
    assert main(["validate", "--out", str(tmp_path / "v.txt")]) == 3


def test_malformed_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"control": {"d": 2.0,}}')
    assert main(["doublet", "--config", str(p)]) == 2
    assert "bad.json:1:" in capsys.readouterr().err


@pytest.mark.parametrize("obj,field", [
    ({"control": {"dd": 1}}, "control.dd"),
    ({"control": {"d": -1}}, "control.d"),
    ({"grid_n": 4}, "grid_n"),
    ({"potential": {"outer_well_sign": 0}}, "outer_well_sign"),
    ({"surface": {"grid": [9]}}, "surface.grid"),
])
def test_bad_fields(tmp_path, capsys, obj, field):
    assert main(["doublet", "--config", _cfg(tmp_path, obj)]) == 2
    assert field in capsys.readouterr().err


def test_env_config(tmp_path, monkeypatch):
    monkeypatch.setenv("JOSTPOLE_CONFIG", _cfg(tmp_path, {"grid_n": 3}))
    assert main(["doublet"]) == 2


def test_tol_override(tmp_path):
    assert main(["doublet", "--tol", "-1"]) == 2
    out = tmp_path / "e.json"
    assert main(["ep", "--tol", "1e-12", "--out", str(out)]) == 0
    assert _json(out)["verify"]["status"] == "EP"


def test_bad_threads():
    assert main(["doublet", "--threads", "0"]) == 2


def test_stdout(capsys):
    assert main(["doublet"]) == 0
    assert json.loads(capsys.readouterr().out)["count"] == 2
