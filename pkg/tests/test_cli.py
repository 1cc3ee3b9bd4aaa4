import csv
import json

import pytest

from twrlab.cli import main, parse_sweep, UsageError
from twrlab.regions import read_region_csv


def test_adder_outer_single_row(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["region", "--scheme", "adder-outer", "--eps-r", "0.1", "--eps-1", "0.05",
                 "--eps-2", "0.05", "--out", str(out)]) == 0
    rows = read_region_csv(out.read_text())
    assert len(rows) == 1
    assert rows[0][0] == pytest.approx(0.5310, abs=1e-4) and rows[0][1] == pytest.approx(0.5310, abs=1e-4)
    manifest = json.loads((tmp_path / "o.csv.manifest.json").read_text())
    assert manifest["command"][1] == "region" and "o.csv" in manifest["outputs"]


def test_region_rejects_bad_eps(capsys):
    assert main(["region", "--scheme", "adder-outer", "--eps-r", "0.7"]) == 2
    assert "eps-r" in capsys.readouterr().err


def test_region_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["region", "--scheme", "df", "--eps-r", "0.1", "--eps-1", "0.05", "--eps-2", "0.2",
                     "--grid-steps", "16", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_region_kernel_file(tmp_path):
    k = {"uplink": [[[0.9, 0.1], [0.1, 0.9]], [[0.1, 0.9], [0.9, 0.1]]],
         "dl1": [[0.95, 0.05], [0.05, 0.95]], "dl2": [[0.95, 0.05], [0.05, 0.95]]}
    kf = tmp_path / "k.json"
    kf.write_text(json.dumps(k))
    out = tmp_path / "r.csv"
    assert main(["region", "--scheme", "outer", "--kernel-file", str(kf), "--grid-steps", "8",
                 "--out", str(out)]) == 0
    rows = read_region_csv(out.read_text())
    assert max(r[0] for r in rows) == pytest.approx(0.5310044064107188, abs=1e-9)
    assert main(["region", "--scheme", "outer", "--kernel-file", str(tmp_path / "missing.json")]) == 3
    kf.write_text("{}")
    assert main(["region", "--scheme", "outer", "--kernel-file", str(kf)]) == 2


def test_unwritable_output():
    assert main(["region", "--scheme", "adder-outer", "--out", "/nonexistent-dir/x.csv"]) == 3


def test_regime_region_row(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["region", "--scheme", "regime", "--eps-r", "0.1", "--eps-1", "0.2", "--eps-2", "0.05",
                 "--out", str(out)]) == 0
    (r12, r21, scheme, meta), = read_region_csv(out.read_text())
    assert scheme == "pnc" and meta["regime"] == "medium"
    assert meta["alpha"] == pytest.approx(0.5237, abs=1e-3)


@pytest.mark.parametrize("scheme,extra", [("pnc", ["--auto-regime"]), ("df-index", ["--alpha", "0.5"])])
def test_simulate_noiseless_zero_bler(tmp_path, scheme, extra):
    out = tmp_path / "s.json"
    assert main(["simulate", "--scheme", scheme, *extra, "--n", "12", "--rate-frac", "0.9",
                 "--trials", "100", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["bler_node1"] == 0.0 and rep["bler_node2"] == 0.0 and rep["trials"] == 100


def test_simulate_records_regime(tmp_path):
    out = tmp_path / "s.json"
    assert main(["simulate", "--scheme", "pnc", "--auto-regime", "--eps-r", "0.1", "--eps-1", "0.2",
                 "--eps-2", "0.05", "--trials", "50", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["regime"] == "medium" and rep["alpha"] == pytest.approx(0.5237, abs=1e-3)


def test_simulate_same_seed_identical_minus_elapsed(tmp_path):
    reps = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert main(["simulate", "--scheme", "hf", "--n", "10", "--eps-r", "0.1", "--rate-frac", "0.8",
                     "--trials", "40", "--seed", "5", "--out", str(out)]) == 0
        d = json.loads(out.read_text())
        d.pop("elapsed_s")
        reps.append(json.dumps(d))
    assert reps[0] == reps[1]


def test_simulate_config_errors(capsys):
    assert main(["simulate", "--scheme", "pnc", "--alpha", "0.2", "--eps-r", "0.1", "--n", "8"]) == 2
    assert main(["simulate", "--scheme", "pnc", "--eps-r", "0.1"]) == 2
    assert main(["simulate", "--scheme", "pnc", "--alpha", "1", "--r12", "0.3"]) == 2
    assert main(["simulate", "--scheme", "bogus"]) == 2


def test_parse_sweep():
    assert parse_sweep("n=8,12,16,20") == ("n", [8, 12, 16, 20])
    key, vals = parse_sweep("rate-frac=0.6:1.4:0.1")
    assert key == "rate-frac" and len(vals) == 9 and vals[0] == 0.6 and vals[-1] == 1.4
    for bad in ("n=", "n", "colour=1,2", "rate-frac=1:0:0.1", "n=a,b"):
        with pytest.raises(UsageError):
            parse_sweep(bad)


def test_sweep_rows_and_single_point(tmp_path):
    base = ["--scheme", "pnc", "--alpha", "1", "--eps-r", "0.1", "--rate-frac", "0.8", "--trials", "200"]
    out = tmp_path / "w.csv"
    assert main(["sweep", *base, "--sweep", "n=8,12", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["n"] for r in rows] == ["8", "12"]
    assert {"bler_relay", "bler_node1", "errors_relay", "rng_name"} <= set(rows[0])

    one = tmp_path / "one.csv"
    sim = tmp_path / "one.json"
    assert main(["sweep", *base, "--sweep", "n=12", "--out", str(one)]) == 0
    assert main(["simulate", *base, "--n", "12", "--out", str(sim)]) == 0
    (row,), rep = list(csv.DictReader(one.open())), json.loads(sim.read_text())
    for k in ("errors_relay", "errors_node1", "errors_node2", "r12_bits", "trials"):
        assert int(row[k]) == rep[k]
    assert main(["sweep", *base, "--sweep", "n="]) == 2


def test_replay_reproduces(tmp_path, capsys):
    out = tmp_path / "w.csv"
    assert main(["sweep", "--scheme", "df-index", "--alpha", "0.5", "--eps-r", "0.05", "--eps-1", "0.05",
                 "--eps-2", "0.05", "--rate-frac", "0.8", "--trials", "50",
                 "--sweep", "seed=1,2", "--out", str(out)]) == 0
    assert main(["replay", str(out) + ".manifest.json"]) == 0
    assert "reproduced" in capsys.readouterr().out
    m = json.loads((tmp_path / "w.csv.manifest.json").read_text())
    m["outputs"]["w.csv"]["sha256_reproducible"] = "0" * 64
    (tmp_path / "w.csv.manifest.json").write_text(json.dumps(m))
    assert main(["replay", str(out) + ".manifest.json"]) == 1
