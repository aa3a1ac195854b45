import json

import numpy as np
import pytest

from haar_sentinel.cli import (
    EXIT_INCOMPATIBLE,
    EXIT_INCONCLUSIVE,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_TERM_BUDGET,
    EXIT_UNSUPPORTED_MUB,
    exit_code_for,
    main,
)

NUMBER_OP_3 = {"eigenvalues": [0, 1, 2, 3], "multiplicities": [1, 3, 3, 1]}
QUBIT = {"eigenvalues": [0, 1], "multiplicities": [1, 1]}


@pytest.fixture
def spectrum_file(tmp_path):
    path = tmp_path / "spectrum.json"
    path.write_text(json.dumps(QUBIT))
    return str(path)


def write_json(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_moments_exact_golden(spectrum_file, capsys):
    assert main(["moments", "--spectrum", spectrum_file, "--t", "1..3"]) == EXIT_OK
    out = capsys.readouterr().out
    values = [float(line.split()[-1]) for line in out.splitlines()[1:]]
    assert values == pytest.approx([0.5, 0.375, 0.3125], abs=1e-12)


def test_moments_bounds_mode(tmp_path, capsys):
    path = write_json(tmp_path, "s.json", NUMBER_OP_3)
    assert main(["moments", "--spectrum", path, "--t", "2", "--mode", "bounds"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[2.25, 24.75]" in out


def test_moments_exact_within_bounds_at_first_order(tmp_path, capsys):
    path = write_json(tmp_path, "s.json", NUMBER_OP_3)
    main(["moments", "--spectrum", path, "--t", "1", "--mode", "exact"])
    exact = float(capsys.readouterr().out.splitlines()[1].split()[-1])
    assert exact == pytest.approx(12 / 8, abs=1e-12)
    main(["moments", "--spectrum", path, "--t", "1", "--mode", "bounds"])
    line = capsys.readouterr().out.splitlines()[1]
    lower = float(line.split("[")[1].split(",")[0])
    upper = float(line.split(",")[1].strip(" ]"))
    assert lower <= exact <= upper


def test_moments_malformed_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["moments", "--spectrum", str(path)]) == EXIT_INPUT


def test_moments_term_budget_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HAAR_SENTINEL_TERM_BUDGET", "2")
    path = write_json(tmp_path, "s.json", NUMBER_OP_3)
    assert main(["moments", "--spectrum", path, "--t", "4"]) == EXIT_TERM_BUDGET


def test_generate_fixed_state_zero_rows(tmp_path):
    ens = write_json(tmp_path, "e.json", {
        "kind": "fixed_basis_state", "N": 8, "seed": 1,
        "params": {"basis_index": 0},
    })
    spectrum = write_json(tmp_path, "s.json", NUMBER_OP_3)
    out = tmp_path / "samples.csv"
    assert main(["generate", "--ensemble", ens, "--spectrum", spectrum,
                 "-M", "10", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "sample"
    assert len(lines) == 11
    assert all(float(v) == 0.0 for v in lines[1:])


def test_generate_is_deterministic(tmp_path):
    ens = write_json(tmp_path, "e.json", {"kind": "haar", "N": 2, "seed": 5})
    spectrum = write_json(tmp_path, "s.json", QUBIT)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["generate", "--ensemble", ens, "--spectrum", spectrum, "-M", "1000", "--out", str(out1)])
    main(["generate", "--ensemble", ens, "--spectrum", spectrum, "-M", "1000", "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_generate_haar_mean(tmp_path):
    ens = write_json(tmp_path, "e.json", {"kind": "haar", "N": 2, "seed": 5})
    spectrum = write_json(tmp_path, "s.json", QUBIT)
    out = tmp_path / "samples.csv"
    main(["generate", "--ensemble", ens, "--spectrum", spectrum, "-M", "100000", "--out", str(out)])
    values = np.loadtxt(out, skiprows=1)
    se = values.std(ddof=1) / np.sqrt(values.size)
    assert abs(values.mean() - 0.5) < 3 * se


def _campaign(tmp_path, **overrides):
    config = {
        "spectrum": {"eigenvalues": [0, 1, 2], "multiplicities": [1, 1, 1]},
        "ensemble": {"kind": "haar", "N": 3, "seed": 17},
        "tiers": ["observable", "permutation", "mub"],
        "t": [1],
        "epsilon": 0.05,
        "budgets": {"M": 20000, "M_perm": 4, "M_u": 2},
        "seed": 17,
    }
    config.update(overrides)
    return write_json(tmp_path, "campaign.json", config)


def test_verify_haar_all_tiers_exit_zero(tmp_path, capsys):
    cfg = _campaign(tmp_path)
    out = tmp_path / "report.json"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert {r["verdict"] for r in doc["reports"]} == {"compatible"}
    assert len(doc["reports"]) == 3
    assert "meta" in doc


def test_verify_counterexample_separation(tmp_path):
    cfg = _campaign(
        tmp_path,
        spectrum=dict(NUMBER_OP_3),
        ensemble={"kind": "counterexample", "n": 3, "seed": 33},
        tiers=["observable", "permutation"],
        budgets={"M": 10000, "M_perm": 20},
        epsilon=0.01,
        seed=33,
    )
    out = tmp_path / "report.json"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == EXIT_INCOMPATIBLE
    reports = {r["tier"]: r["verdict"] for r in json.loads(out.read_text())["reports"]}
    assert reports["observable"] == "compatible"
    assert reports["permutation"] == "incompatible"


def test_verify_inconclusive_exit_code(tmp_path):
    # deterministic |0> ensemble: |R| = 1.5 sits above delta but below epsilon
    cfg = _campaign(
        tmp_path,
        spectrum=dict(NUMBER_OP_3),
        ensemble={"kind": "fixed_basis_state", "N": 8, "seed": 2,
                  "params": {"basis_index": 0}},
        tiers=["observable"],
        budgets={"M": 10000},
        epsilon=2.0,
        seed=2,
    )
    assert main(["verify", "--config", cfg]) == EXIT_INCONCLUSIVE


def test_verify_unsupported_mub_dimension(tmp_path):
    cfg = _campaign(
        tmp_path,
        spectrum={"eigenvalues": [0, 1], "multiplicities": [3, 3]},
        ensemble={"kind": "haar", "N": 6, "seed": 4},
        tiers=["mub"],
        seed=4,
    )
    assert main(["verify", "--config", cfg]) == EXIT_UNSUPPORTED_MUB


def test_verify_invalid_config(tmp_path):
    cfg = write_json(tmp_path, "c.json", {"spectrum": QUBIT})
    assert main(["verify", "--config", cfg]) == EXIT_INPUT


def test_verify_reports_deterministic_across_runs_and_workers(tmp_path):
    cfg = _campaign(tmp_path, budgets={"M": 5000, "M_perm": 3, "M_u": 2})
    outs = []
    for name, workers in (("r1.json", None), ("r2.json", None), ("r8.json", "8")):
        out = tmp_path / name
        argv = ["verify", "--config", cfg, "--out", str(out)]
        if workers:
            argv += ["--workers", workers]
        main(argv)
        outs.append(json.dumps(json.loads(out.read_text())["reports"], sort_keys=True))
    assert outs[0] == outs[1] == outs[2]


def test_verify_from_pregenerated_samples(tmp_path):
    # generate -> verify round trip through the CSV interface
    ens = write_json(tmp_path, "e.json", {"kind": "haar", "N": 8, "seed": 210})
    spectrum = write_json(tmp_path, "s.json", NUMBER_OP_3)
    csv = tmp_path / "samples.csv"
    main(["generate", "--ensemble", ens, "--spectrum", spectrum,
          "-M", "50000", "--out", str(csv)])
    cfg = write_json(tmp_path, "c.json", {
        "spectrum": NUMBER_OP_3,
        "samples": str(csv),
        "tiers": ["observable"],
        "t": [1],
        "epsilon": 0.05,
        "seed": 210,
    })
    out = tmp_path / "report.json"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())["reports"][0]
    assert report["provenance"]["samples_file"] == str(csv)
    assert report["provenance"]["M"] == 50000


def test_verify_samples_file_rejects_extended_tiers(tmp_path):
    csv = tmp_path / "samples.csv"
    csv.write_text("sample\n0.5\n0.25\n")
    cfg = write_json(tmp_path, "c.json", {
        "spectrum": QUBIT,
        "samples": str(csv),
        "tiers": ["observable", "permutation"],
        "t": [1],
        "epsilon": 0.05,
        "seed": 1,
    })
    assert main(["verify", "--config", cfg]) == EXIT_INPUT


def test_load_samples_json_lines(tmp_path):
    from haar_sentinel.verify import load_samples

    path = tmp_path / "samples.jsonl"
    path.write_text("0.125\n0.5\n0.375\n")
    assert load_samples(str(path)).tolist() == [0.125, 0.5, 0.375]


def test_exit_code_is_function_of_verdict_multiset():
    assert exit_code_for(["compatible", "compatible"]) == EXIT_OK
    assert exit_code_for(["compatible", "inconclusive"]) == EXIT_INCONCLUSIVE
    assert exit_code_for(["inconclusive", "incompatible"]) == EXIT_INCOMPATIBLE
    assert exit_code_for([]) == EXIT_OK


def test_mub_dump_and_check_round_trip(tmp_path, capsys):
    out = tmp_path / "mub5.json"
    assert main(["mub", "dump", "-N", "5", "--out", str(out)]) == EXIT_OK
    assert main(["mub", "check", "--file", str(out)]) == EXIT_OK
    assert "pairwise unbiased" in capsys.readouterr().out


def test_mub_dump_unsupported(capsys):
    assert main(["mub", "dump", "-N", "6"]) == EXIT_UNSUPPORTED_MUB
