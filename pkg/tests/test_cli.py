import csv
import json

import pytest

from confopt.cli import main, resolve_config, read_config_file, ConfigError


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_run_writes_full_trace(tmp_path):
    out = tmp_path / "trace.csv"
    code = main(["run", "--problem", "corr_quad", "--method", "rgd", "--iters", "100",
                 "--epsilon", "0.01", "--mu", "0.9", "--output", str(out)])
    assert code == 0
    r = rows(out)
    assert r[0] == ["iter", "f", "gradnorm", "diverged"]
    assert len(r) == 102 and r[1][0] == "0" and r[-1][0] == "100"
    assert float(r[-1][1]) < float(r[1][1])


def test_run_divergence_flag(tmp_path):
    out = tmp_path / "trace.csv"
    assert main(["run", "--problem", "schwefel", "--method", "cm", "--iters", "2000",
                 "--epsilon", "0.01", "--mu", "0.9", "--output", str(out)]) == 0
    r = rows(out)
    assert r[-1][3] == "1" and all(row[3] == "0" for row in r[1:-1])


def test_run_with_tuning(tmp_path):
    out = tmp_path / "trace.csv"
    assert main(["run", "--problem", "booth", "--method", "cm", "--iters", "50", "--tune",
                 "--budget", "5", "--trial-iters", "20", "--output", str(out)]) == 0
    assert len(rows(out)) >= 2


@pytest.mark.parametrize("argv", [
    ["run", "--method", "nag", "--delta", "1.0"],
    ["run", "--method", "cm", "--alpha", "0.5"],
    ["run", "--problem", "ackley"],
    ["run", "--method", "adam"],
    ["run", "--epsilon", "-1"],
    ["run", "--mu", "1.5"],
    ["run", "--iters", "ten"],
])
def test_invalid_inputs_exit_two(argv, tmp_path):
    assert main(argv + ["--output", str(tmp_path / "x.csv")]) == 2
    assert not (tmp_path / "x.csv").exists()


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["run", "--bogus", "1"])
    assert e.value.code == 2


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# comment\nproblem = booth\niters = 7\nseed = 3\n")
    assert read_config_file(cfg)["iters"] == "7"
    c = resolve_config("run", {"iters": "9"}, cfg, env={})
    assert c["problem"] == "booth" and c["iters"] == 9 and c["seed"] == 3
    out = tmp_path / "t.csv"
    assert main(["run", "--config", str(cfg), "--output", str(out)]) == 0
    assert len(rows(out)) == 9


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign here\n")
    with pytest.raises(ConfigError):
        read_config_file(bad)
    unknown = tmp_path / "u.cfg"
    unknown.write_text("colour = blue\n")
    with pytest.raises(ConfigError):
        resolve_config("run", {}, unknown, env={})
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_seed_from_environment():
    assert resolve_config("tune", {}, env={"CONFOPT_SEED": "11"})["seed"] == 11
    assert resolve_config("tune", {"seed": "4"}, env={"CONFOPT_SEED": "11"})["seed"] == 4
    assert resolve_config("tune", {}, env={})["seed"] == 0


def test_tune_outputs(tmp_path):
    prefix = tmp_path / "t"
    assert main(["tune", "--problem", "booth", "--method", "cm,rgd", "--budget", "6",
                 "--trial-iters", "20", "--bins", "4", "--prefix", str(prefix), "--seed", "1"]) == 0
    trials = rows(f"{prefix}_trials.csv")
    assert len(trials) == 13
    best = json.loads(open(f"{prefix}_best.json").read())
    assert set(best["best"]) == {"cm", "rgd"} and best["budget"] == 6
    hist = rows(f"{prefix}_hist.csv")
    assert hist[0][:5] == ["method", "param", "bin_lo", "bin_hi", "count"]
    # deterministic under a fixed seed
    prefix2 = tmp_path / "u"
    main(["tune", "--problem", "booth", "--method", "cm,rgd", "--budget", "6",
          "--trial-iters", "20", "--bins", "4", "--prefix", str(prefix2), "--seed", "1"])
    assert rows(f"{prefix2}_trials.csv") == trials


def test_stability_outputs(tmp_path):
    loc, thr = tmp_path / "e.csv", tmp_path / "t.csv"
    assert main(["stability", "--h-points", "20", "--locus-output", str(loc),
                 "--threshold-output", str(thr)]) == 0
    assert len(rows(loc)) == 1 + 3 * 20
    t = rows(thr)
    assert t[0][:4] == ["mu", "method", "h_analytic", "h_empirical"] and len(t) == 10


def test_matcomp_output(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["matcomp", "--n", "20", "--r", "2", "--s", "0.4", "--iters", "5",
                 "--epsilon", "0.001", "--output", str(out)]) == 0
    r = rows(out)
    assert r[0] == ["method", "iter", "loss", "diverged"] and len(r) == 1 + 4 * 6


def test_list(capsys):
    assert main(["list"]) == 0
    assert "rosenbrock" in capsys.readouterr().out
