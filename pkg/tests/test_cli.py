import json
import re

import numpy as np
import pytest

from pscontract.cli import load_config, main, parse_fiber
from pscontract.errors import ConfigError
from pscontract.fiber import SpinFiber
from pscontract.suites import SUITE_IDS


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def strip_timestamp(text):
    return re.sub(r'"timestamp": "[^"]*"', '"timestamp": ""', text)


def test_zero_xi1_is_rejected(tmp_path, capsys):
    cfg = write(tmp_path, {"realization": "sl2", "xi1": [0.0]})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "regularity violated" in capsys.readouterr().err


def test_config_problems_are_all_reported():
    with pytest.raises(ConfigError) as exc:
        load_config({"realization": "sl2", "seed": -1, "suites": ["nope"], "bogus": 1, "r_grid": [0.5, 1.0]})
    text = "\n".join(exc.value.problems)
    for needle in ("bogus", "seed", "nope", "r_grid"):
        assert needle in text


def test_bad_realization_does_not_mask_other_errors():
    with pytest.raises(ConfigError) as exc:
        load_config({"realization": "so5"})
    assert len(exc.value.problems) == 1


def test_xi1_length_checked():
    with pytest.raises(ConfigError, match="a-coordinates"):
        load_config({"realization": "sl3", "xi1": [1.0]})


def test_xi2_must_match_m():
    with pytest.raises(ConfigError):
        load_config({"realization": "sl2", "xi2": [1.0]})


def test_tolerance_keys_must_name_suites():
    with pytest.raises(ConfigError):
        load_config({"tolerances": {"nosuch.check": 1e-3}})
    assert load_config({"tolerances": {"prop22.commutator": 1e-4}}).tolerances == {"prop22.commutator": 1e-4}


def test_suites_are_put_in_registry_order():
    cfg = load_config({"suites": ["prop83", "algebra"]})
    assert cfg.suites == ["algebra", "prop83"]


@pytest.mark.parametrize("text, j", [("spin-1/2", 0.5), ("spin-1", 1.0), ("spin-1.5", 1.5)])
def test_parse_spin_fiber(text, j):
    fib = parse_fiber(text)
    assert isinstance(fib, SpinFiber) and fib.j == j


@pytest.mark.parametrize("text", ["spin-0", "spin-1/3", "spin", "other"])
def test_parse_fiber_rejects(text):
    with pytest.raises(ValueError):
        parse_fiber(text)


def test_empty_suite_list(tmp_path):
    cfg = write(tmp_path, {"realization": "sl2", "suites": []})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["suites"] == {}
    assert (tmp_path / "sweeps.csv").read_text() == "check_id,r,max_error,probe_count\n"


def test_unknown_suite_flag(tmp_path, capsys):
    cfg = write(tmp_path, {"realization": "sl2"})
    assert main(["verify", "--config", cfg, "--suite", "prop99", "--out", str(tmp_path)]) == 2
    assert "prop99" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["verify", "--config", str(tmp_path / "absent.json")]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["verify", "--config", str(p)]) == 2


def test_report_schema_and_determinism(tmp_path):
    cfg = write(tmp_path, {"realization": "sl2", "suites": ["algebra", "prop51", "prop81"]})
    outs = []
    for name in ("a", "b"):
        assert main(["verify", "--config", cfg, "--out", str(tmp_path / name)]) == 0
        outs.append(((tmp_path / name / "report.json").read_text(), (tmp_path / name / "sweeps.csv").read_text()))
    assert strip_timestamp(outs[0][0]) == strip_timestamp(outs[1][0])
    assert outs[0][1] == outs[1][1]
    report = json.loads(outs[0][0])
    assert report["meta"]["registry_version"] == 1
    assert report["meta"]["config"]["seed"] == 0
    assert list(report["suites"]) == ["algebra", "prop51", "prop81"]
    for entry in report["suites"].values():
        assert set(entry) == {"status", "max_residual", "tolerance", "details"}
        assert entry["status"] == "pass"
    assert "prop81" in report["suites"]["prop81"]["details"]["sweeps"]


def test_seed_override_changes_probes(tmp_path):
    cfg = write(tmp_path, {"realization": "sl2", "suites": ["prop22"]})
    main(["verify", "--config", cfg, "--out", str(tmp_path / "a")])
    main(["verify", "--config", cfg, "--seed", "7", "--out", str(tmp_path / "b")])
    ra = json.loads((tmp_path / "a" / "report.json").read_text())
    rb = json.loads((tmp_path / "b" / "report.json").read_text())
    assert rb["meta"]["config"]["seed"] == 7
    assert ra["suites"]["prop22"]["details"] != rb["suites"]["prop22"]["details"]


def test_tolerance_override_can_fail_a_suite(tmp_path):
    cfg = write(tmp_path, {"realization": "sl2", "suites": ["lemma42"], "tolerances": {"lemma42": 0.0}})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 1
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["suites"]["lemma42"]["status"] == "fail"


def test_algebra_inspect(capsys):
    assert main(["algebra", "inspect", "--realization", "sl3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["dim"] == 8


def test_algebra_inspect_unknown(capsys):
    assert main(["algebra", "inspect", "--realization", "sl9"]) == 2


def test_decompose(capsys):
    assert main(["decompose", "--g", "[[2, 1], [1, 1]]"]) == 0
    doc = json.loads(capsys.readouterr().out)
    k, a, n = (np.array(doc["iwasawa"][x]) for x in "kan")
    np.testing.assert_allclose(k @ a @ n, [[2, 1], [1, 1]], atol=1e-12)
    b = doc["bruhat"]
    np.testing.assert_allclose(np.array(b["nbar"]) @ np.array(b["m"]) @ np.array(b["a"]) @ np.array(b["n"]),
                               [[2, 1], [1, 1]], atol=1e-12)


def test_decompose_outside_big_cell(capsys):
    assert main(["decompose", "--g", "[[0, 1], [-1, 0]]"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["bruhat"] is None and "minor" in doc["bruhat_error"]


@pytest.mark.parametrize("g", ["[[1, 2], [3, 4]]", "[[1, 0, 0], [0, 1, 0]]", "oops"])
def test_decompose_rejects(g):
    assert main(["decompose", "--g", g]) == 2


def test_sweep_command_prints_csv(tmp_path, capsys):
    cfg = write(tmp_path, {"realization": "sl2"})
    assert main(["contract", "sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "check_id,r,max_error,probe_count"
    ids = {line.split(",")[0] for line in lines[1:]}
    assert {"prop71", "prop81", "prop83_part1", "prop83_part2"} <= ids


def test_suite_registry_is_complete():
    assert len(SUITE_IDS) == 17 and len(set(SUITE_IDS)) == 17
