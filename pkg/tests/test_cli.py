import csv
import json
import logging

import pytest

from eggbergman.cli import (
    ConfigError,
    RunConfig,
    build_config,
    main,
    parse_config_file,
    run_suite,
    solve_and_cache,
)
from eggbergman.domain import EggDomain
from eggbergman.kernel import KernelParams
from eggbergman.report import VerificationReport, strip_timestamps


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sample\nn = 2\na = 0.5  # egg\nsamples = 1e5\nsuites = gamma, kernel\nh-floor = 1e-4\n")
    values = parse_config_file(cfg)
    assert values == {"n": 2, "a": 0.5, "samples": 100_000, "suites": "gamma, kernel", "h_floor": 1e-4}
    rc = build_config(values)
    assert rc.suites == ("gamma", "kernel") and rc.n == 2
    cfg.write_text("bogus = 1\n")
    with pytest.raises(ConfigError):
        parse_config_file(cfg)
    cfg.write_text("samples = 2.5\n")
    with pytest.raises(ConfigError):
        parse_config_file(cfg)


@pytest.mark.parametrize("bad", [
    {"a": 3.0}, {"p": 0.5}, {"lambda": -2.0}, {"sigma": -1.0}, {"seed": -1}, {"grid": 10},
    {"h_floor": 0.5}, {"suites": "nope"}, {"suites": ""}, {"p": 2.0, "lambda": -0.5, "suites": "schur"},
    {"sigma": 1.0, "d": 2.5, "suites": "gamma"},
])
def test_invalid_configs(bad):
    values = {"suites": "gamma", **bad}
    with pytest.raises(ConfigError):
        build_config(values)


def test_exit_codes(tmp_path, capsys):
    out = str(tmp_path / "o")
    assert main(["verify", "decomposition", "--n", "1", "--m", "1", "--a", "0.5",
                 "--degree", "8", "--seed", "7", "--out", out]) == 0
    assert main(["verify", "kernel", "--a", "0.5", "--sigma", "1", "--samples", "2000", "--out", out]) == 1
    err = capsys.readouterr().err
    assert "failing checks: kernel/reproducing-property" in err
    assert main(["verify", "nope", "--out", out]) == 2
    assert main(["verify", "gamma", "--a", "5", "--out", out]) == 2
    assert main(["frobnicate"]) == 2


def test_reports_written(tmp_path):
    cfg = RunConfig(a=1.0, sigma=1.0, d=0.5, grid=1000, suites=("gamma",), out=str(tmp_path))
    code, reports = run_suite(cfg.validate())
    assert code == 0
    rows = [json.loads(line) for line in (tmp_path / "report.jsonl").read_text().splitlines()]
    assert len(rows) == len(reports)
    for row in rows:
        assert {"suite", "check", "anchor", "estimate", "tolerance", "pass", "params", "timestamp"} <= set(row)
        assert row["anchor"]
    with open(tmp_path / "summary.csv", newline="") as fh:
        table = list(csv.reader(fh))
    assert table[0] == ["suite", "check", "estimate", "tolerance", "pass"]
    assert all(r[4] == "true" for r in table[1:])


def test_same_config_same_report(tmp_path):
    texts = []
    for i in range(2):
        cfg = RunConfig(a=0.5, sigma=1.0, samples=20_000, seed=3, suites=("decomposition", "kernel"),
                        out=str(tmp_path / f"r{i}"), cache_dir=str(tmp_path / f"c{i}"))
        run_suite(cfg.validate())
        texts.append((tmp_path / f"r{i}" / "report.jsonl").read_text())
    assert texts[0] != ""
    assert strip_timestamps(texts[0]) == strip_timestamps(texts[1])


def test_kernel_cache(tmp_path, caplog):
    d = EggDomain(1, 1, 0.5)
    first = solve_and_cache(d, 1.0, tmp_path)
    files = list(tmp_path.glob("kernel_*.txt"))
    assert len(files) == 1
    assert KernelParams.from_record(files[0].read_text()) == first
    assert solve_and_cache(d, 1.0, tmp_path) == first

    # corrupt file -> warning and recompute
    files[0].write_text("garbage\n")
    with caplog.at_level(logging.WARNING, logger="eggbergman"):
        again = solve_and_cache(d, 1.0, tmp_path)
    assert again == first and "recomputing" in caplog.text
    caplog.clear()

    # coefficients that no longer solve the system are rejected on load
    bad = KernelParams(d, 1.0, tuple(c * 1.01 for c in first.coeffs), first.c_sigma, first.residual)
    files[0].write_text(bad.to_record())
    with caplog.at_level(logging.WARNING, logger="eggbergman"):
        assert solve_and_cache(d, 1.0, tmp_path) == first
    assert "residual" in caplog.text
    caplog.clear()

    # a record for other parameters under this name is rejected too
    other = solve_and_cache(EggDomain(1, 1, 2.0), 1.0, tmp_path / "x")
    files[0].write_text(other.to_record())
    with caplog.at_level(logging.WARNING, logger="eggbergman"):
        assert solve_and_cache(d, 1.0, tmp_path) == first
    assert "different parameters" in caplog.text


def test_report_serialization():
    r = VerificationReport("s", "c", "anchor", complex(1, 2), float("inf"), True, {"x": 1})
    row = r.to_dict()
    assert row["estimate"] == [1.0, 2.0] and row["tolerance"] == "inf" and row["pass"] is True
    assert "passed" not in row
