"""This module tests the command line tool end to end"""

import json
import math
import os

import pandas as pd
import pytest

from smdsim.cli import main, EXIT_OK, EXIT_INVALID
from smdsim.config import OUTPUT_ENV
from smdsim.transport.network import INSTANCE_DIR


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Output directory taken from the environment."""

    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path))
    return tmp_path


def read_trace(path):
    with open(str(path)) as handle:
        header = handle.readline()
    return header, pd.read_csv(str(path), comment="#")


def read_summary(path):
    with open(str(path)) as handle:
        return json.load(handle)


def test_invalid_horizon(output_dir, capsys):
    assert main(["smd", "--N", "0"]) == EXIT_INVALID
    assert capsys.readouterr().err.startswith("invalid-config: N:")


def test_invalid_delta(output_dir, capsys):
    assert main(["smd", "--delta", "0.6"]) == EXIT_INVALID
    assert "invalid-config: delta:" in capsys.readouterr().err


def test_malformed_flag(output_dir):
    with pytest.raises(SystemExit) as error:
        main(["smd", "--N", "many"])
    assert error.value.code == 2


def test_online_writes_traces(output_dir):
    assert main(["online", "casino", "--N", "200", "--seeds", "2"]) == EXIT_OK

    for seed in (0, 1):
        path = output_dir / "online-casino-majority-expected-seed{}.csv" \
            .format(seed)
        header, frame = read_trace(path)

        assert header.startswith("# bound:")
        assert list(frame.columns) == ["experiment", "seed", "step", "metric",
                                       "value", "bound"]
        assert frame["step"].is_monotonic_increasing
        assert frame["step"].iloc[-1] == 200
        assert (frame["value"] <= frame["bound"]).iloc[-1]

    summary = read_summary(output_dir /
                           "online-casino-majority-expected-summary.json")
    assert len(summary["regrets"]) == 2


def test_config_file_under_flags(output_dir):
    config = output_dir / "config.json"
    config.write_text(json.dumps({"seed": 4,
                                  "online": {"N": 50, "policy": "fixed"}}))

    assert main(["online", "--config", str(config),
                 "--policy", "majority"]) == EXIT_OK

    assert (output_dir / "online-casino-majority-expected-seed4.csv").exists()
    summary = read_summary(output_dir /
                           "online-casino-majority-expected-summary.json")
    assert summary["N"] == 50
    assert summary["policy"] == "majority"


def test_unknown_config_field(output_dir, capsys):
    config = output_dir / "config.json"
    config.write_text(json.dumps({"smd": {"bogus": 1}}))

    assert main(["smd", "--config", str(config)]) == EXIT_INVALID
    assert "invalid-config: bogus:" in capsys.readouterr().err


def test_unreadable_config(output_dir, capsys):
    config = output_dir / "config.json"
    config.write_text("{not json")

    assert main(["smd", "--config", str(config)]) == EXIT_INVALID
    assert "invalid-config: config:" in capsys.readouterr().err


def test_traffic_dual_pigou(output_dir):
    assert main(["traffic", "dual", "--network", "pigou.json"]) == EXIT_OK

    summary = read_summary(output_dir / "traffic-dual-pigou-summary.json")
    assert summary["converged"]
    assert summary["x"][0] == pytest.approx(0.2355, abs=1e-4)


def test_traffic_unknown_network(output_dir):
    assert main(["traffic", "check", "--network", "missing.json"]) == \
        EXIT_INVALID


def test_traffic_equilibrium_traces(output_dir):
    assert main(["traffic", "equilibrium", "--network", "braess",
                 "--N", "100,1000", "--stride", "10"]) == EXIT_OK

    header, frame = read_trace(output_dir /
                               "traffic-equilibrium-braess-N1000-seed0.csv")
    assert "ln n_w" in header
    assert frame["metric"].unique().tolist() == ["gap"]
    assert len(frame) == 100


def test_smd_run(tmp_path):
    assert main(["smd", "--N", "100,200", "--seeds", "3",
                 "--output-dir", str(tmp_path)]) == EXIT_OK

    assert (tmp_path / "smd-simplex-linear-N200-seed2.csv").exists()
    summary = read_summary(tmp_path / "smd-simplex-linear-summary.json")
    assert [run["N"] for run in summary["runs"]] == [100, 200]


@pytest.mark.parametrize("filename", sorted(os.listdir(INSTANCE_DIR)))
def test_traffic_check_shipped_files(output_dir, filename):
    path = os.path.join(INSTANCE_DIR, filename)

    assert main(["traffic", "check", "--network", path]) == EXIT_OK

    name = read_summary(path)["name"]
    summary = read_summary(output_dir /
                           "traffic-check-{}-summary.json".format(name))
    assert all(summary["checks"].values())


def test_zo_inner_tau2_alias(output_dir):
    assert main(["zo", "--feedback", "double-smoothed", "--paper-literal",
                 "--dims", "2", "--eps", "0.4", "--seeds", "1",
                 "--max-calls", "100000"]) == EXIT_OK

    summary = read_summary(output_dir /
                           "zo-double-smoothed-quadratic-summary.json")
    assert summary["inner_tau2"] is True
    assert math.isfinite(summary["table"][0]["calls"])


def test_traffic_logit_reference_converges(output_dir, caplog):
    assert main(["traffic", "logit", "--horizon", "50"]) == EXIT_OK

    assert not [record for record in caplog.records
                if record.levelname == "WARNING"]
    summary = read_summary(output_dir / "traffic-logit-pigou-summary.json")
    assert summary["reference_flow"][0] == pytest.approx(0.2355, abs=1e-4)
