import csv
import json

import pytest

from bethe_sumrules.cli import REPORT_HEADER, main, run_experiment
from bethe_sumrules.config import ConfigError, parse_config


def _write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def _rows(out):
    with open(out / "report.csv") as fh:
        return list(csv.reader(fh))


def test_minimal_config_defaults():
    cfg = parse_config('{"experiment": "eigenvalues", "potential": {"radial": [2]}}')
    assert cfg.weight.sin_power == 4 and cfg.tolerances.identity == 1e-7


@pytest.mark.parametrize("doc", [
    '{"experiment": "eigenvalues", "tolerances": {"slack": -1e-8}}',
    '{"experiment": "eigenvalues", "potentail": {}}',
    '{"experiment": "eigenvalues", "potential": {"radial": [1], "random": {"seed": 1, "depth": 1}}}',
    '{"experiment": "eigenvalues", "weight": {"sin_power": 3}}',
    '{"experiment": "eigenvalues",',
])
def test_bad_configs_rejected(doc):
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_error_names_location():
    with pytest.raises(ConfigError, match="tolerances.slack"):
        parse_config('{"experiment": "eigenvalues", "tolerances": {"slack": -1}}')


def test_seeded_potential_deterministic():
    doc = '{"experiment": "eigenvalues", "potential": {"random": {"seed": 7, "depth": 3, "amplitude": 2}}}'
    assert parse_config(doc).potential.build() == parse_config(doc).potential.build()


def test_free_identity_suite(tmp_path):
    cfg = _write(tmp_path, {"experiment": "identity-suite"})
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    rows = _rows(tmp_path / "o")
    assert tuple(rows[0]) == REPORT_HEADER
    res = [float(r[4]) for r in rows[1:] if r[4]]
    assert res and all(x == 0.0 for x in res)


def test_rank_one_eigen_row(tmp_path):
    cfg = _write(tmp_path, {"experiment": "eigenvalues", "potential": {"radial": [2]}})
    assert main(["eig", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    eig = [r for r in _rows(tmp_path / "o") if r[1] == "eigenvalue"]
    assert len(eig) == 1 and abs(float(eig[0][2]) - 3.0) < 1e-10


def test_random_ledger_passes(tmp_path):
    cfg = _write(tmp_path, {"experiment": "ledger-inequality",
                            "potential": {"random": {"seed": 3, "depth": 3, "amplitude": 2}}})
    assert main(["ledger", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    led = [r for r in _rows(tmp_path / "o") if r[1] == "ledger_inequality"][0]
    assert float(led[5]) >= -1e-8
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["passed"] and summary["kappa_M"] == pytest.approx(0.7071067811865476)


def test_report_is_reproducible(tmp_path):
    for name in ("a", "b"):
        assert main(["verify", "--seed", "5", "--out", str(tmp_path / name)]) == 0
    a, b = _rows(tmp_path / "a"), _rows(tmp_path / "b")
    assert [r[:-1] for r in a] == [r[:-1] for r in b]


def test_tolerance_failure_exit_code(tmp_path):
    assert main(["verify", "--seed", "2", "--tol", "1e-30", "--out", str(tmp_path / "o")]) == 1


def test_conjecture_reports_failed_identity(tmp_path):
    cfg = _write(tmp_path, {"experiment": "conjecture-form", "potential": {"radial": [1.0, 0.5]}})
    assert main(["conjecture", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    status = {r[0]: r[8] for r in _rows(tmp_path / "o")[1:]}
    assert status["check_A1"] == "pass" and status["x2m4_radial"] == "pass"
    assert status["check_Ax2m4"] == "fail"


def test_potential_file(tmp_path):
    _write(tmp_path, {"values": {"0,1": 2.0}}, "pot.json")
    cfg = _write(tmp_path, {"experiment": "main-lemma", "potential": {"file": "pot.json"}, "depth": 2})
    assert main(["jost", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0


def test_radial_subcommand(tmp_path):
    cfg = _write(tmp_path, {"experiment": "radial-compare", "potential": {"radial": [1.0, -0.5, 2.0]}})
    assert main(["radial", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0


def test_radial_needs_profile(tmp_path):
    assert main(["radial", "--seed", "1", "--out", str(tmp_path / "o")]) == 2


def test_seed_needs_random_potential(tmp_path):
    cfg = _write(tmp_path, {"experiment": "eigenvalues", "potential": {"radial": [2]}})
    assert main(["eig", "--config", str(cfg), "--seed", "3", "--out", str(tmp_path / "o")]) == 2


def test_scan_runs(tmp_path):
    cfg = _write(tmp_path, {"experiment": "hypothesis-scan", "potential": {"radial": [1.0, 0.6, 0.4]},
                            "scan_depths": [1, 2, 3]})
    assert main(["scan", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert [t["N"] for t in summary["trend"]] == [1, 2, 3]


def test_run_experiment_in_process():
    rep = run_experiment(parse_config('{"experiment": "eigenvalues", "potential": {"values": {"1,2": -3}}}'))
    assert rep.passed and rep.summary["ledger"]
