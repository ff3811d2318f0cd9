"""Command-line front end: ``confopt {run,tune,stability,diagnose,matcomp,list}``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines, then command-line flags. ``CONFOPT_SEED`` supplies the
seed when neither the file nor the flags do.
"""
from __future__ import annotations

import argparse
import inspect
import math
import os
import sys
from dataclasses import asdict

import numpy as np

from .core import OptimizerParams, ParameterError
from .io import write_csv, write_json
from .optimizers import METHOD_PARAMS, METHODS, StopCriteria, run
from .problems import REGISTRY, get_problem
from .problems.matcomp import alternating_minimize, matcomp_generate
from .tuning import PARAM_NAMES, histogram, matcomp_search, random_search, write_trials_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(Exception):
    pass


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _list(text) -> list:
    if isinstance(text, (list, tuple)):
        return list(text)
    return [t.strip() for t in str(text).split(",") if t.strip()]


def _floats(text) -> list:
    return [float(t) for t in _list(text)]


def _opt_int(text):
    return None if text in (None, "", "none", "None") else int(text)


# key -> (type, default); None defaults for seed mean "use CONFOPT_SEED or 0"
COMMON = {"seed": (int, None)}
PARAMS = {"epsilon": (float, 0.01), "mu": (float, 0.9), "delta": (float, 0.0), "alpha": (float, 1.0)}
TUNE = {"budget": (int, 100), "trial_iters": (int, 500)}

SCHEMA = {
    "run": {**COMMON, **PARAMS, **TUNE, "problem": (str, "corr_quad"), "dim": (_opt_int, None),
            "method": (str, "rgd"), "iters": (int, 1000), "grad_tol": (float, 0.0), "f_tol": (float, 0.0),
            "divergence_bound": (float, 1e12), "tune": (_bool, False), "output": (str, "trace.csv")},
    "tune": {**COMMON, **TUNE, "problem": (str, "corr_quad"), "dim": (_opt_int, None),
             "method": (_list, ["rgd"]), "bins": (int, 20), "prefix": (str, "tune")},
    "stability": {"mus": (_floats, [0.5, 0.9, 0.99]), "methods": (_list, ["cm", "nag", "rgd"]),
                  "gamma": (float, 1.0), "m": (float, 1.0), "lam": (float, 1.0), "h_max": (float, 3.0),
                  "h_points": (int, 300), "tol": (float, 1e-10),
                  "locus_output": (str, "eigenvalues.csv"), "threshold_output": (str, "thresholds.csv")},
    "diagnose": {"full": (_bool, False), "output": (str, "diagnose.json")},
    "matcomp": {**COMMON, **PARAMS, **TUNE, "n": (int, 100), "r": (int, 5), "s": (float, 0.3),
                "iters": (int, 500), "methods": (_list, ["gd", "cm", "nag", "rgd"]), "tune": (_bool, False),
                "init_seed": (int, 0), "output": (str, "matcomp.csv")},
}


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (t.strip() for t in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def resolve_config(command: str, flags: dict, config_path=None, env=None) -> dict:
    """Merge defaults, file values and flags for ``command`` into typed settings."""
    schema = SCHEMA[command]
    env = os.environ if env is None else env
    raw = {k: d for k, (_, d) in schema.items()}
    given = set()
    if config_path:
        for key, value in read_config_file(config_path).items():
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} for {command}")
            raw[key] = value
            given.add(key)
    for key, value in flags.items():
        raw[key] = value
        given.add(key)
    cfg = {}
    for key, (typ, _) in schema.items():
        value = raw[key]
        try:
            cfg[key] = value if value is None else typ(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad value for {key}: {value!r} ({e})") from None
    if "seed" in schema and cfg["seed"] is None:
        try:
            cfg["seed"] = int(env.get("CONFOPT_SEED", 0))
        except ValueError:
            raise ConfigError(f"CONFOPT_SEED must be an integer, got {env['CONFOPT_SEED']!r}") from None
    cfg["_given"] = given
    return cfg


# --- helpers ------------------------------------------------------------------

def _check_method(method: str):
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {sorted(METHODS)}")


def _build_problem(cfg):
    name = cfg["problem"]
    if name not in REGISTRY:
        raise ConfigError(f"unknown problem {name!r}; choose from {sorted(REGISTRY)}")
    factory = REGISTRY[name][0]
    kwargs = {}
    if "seed" in inspect.signature(factory).parameters:
        kwargs["seed"] = cfg["seed"]
    return get_problem(name, cfg["dim"], **kwargs)


def _params(cfg, method: str) -> OptimizerParams:
    """Optimizer parameters for ``method``, refusing RGD-only settings elsewhere."""
    used = METHOD_PARAMS[method]
    given = cfg["_given"]
    if "delta" not in used and "delta" in given and cfg["delta"] != 0.0:
        raise ConfigError(f"delta is only read by rgd, not {method}")
    if "alpha" not in used and "alpha" in given and cfg["alpha"] != 1.0:
        raise ConfigError(f"alpha is only read by rgd, not {method}")
    return OptimizerParams(cfg["epsilon"], cfg["mu"],
                           cfg["delta"] if "delta" in used else 0.0,
                           cfg["alpha"] if "alpha" in used else 1.0)


def _params_for_all(cfg, method: str) -> OptimizerParams:
    used = METHOD_PARAMS[method]
    return OptimizerParams(cfg["epsilon"], cfg["mu"],
                           cfg["delta"] if "delta" in used else 0.0,
                           cfg["alpha"] if "alpha" in used else 1.0)


# --- subcommands ------------------------------------------------------------------

def cmd_run(cfg) -> int:
    method = cfg["method"]
    _check_method(method)
    problem = _build_problem(cfg)
    if cfg["tune"]:
        res = random_search(problem, method, cfg["budget"], cfg["trial_iters"], cfg["seed"])
        if res.all_diverged:
            print("every tuning trial diverged; using the first draw", file=sys.stderr)
        params = res.best.params
    else:
        params = _params(cfg, method)
    stop = StopCriteria(cfg["iters"], cfg["grad_tol"], cfg["f_tol"], cfg["divergence_bound"])
    tr = run(method, problem, params, stop=stop, record_states=False)
    last = len(tr.fvals) - 1
    rows = ((k, f, g, tr.diverged and k == last) for k, (f, g) in enumerate(zip(tr.fvals, tr.gradnorms)))
    write_csv(cfg["output"], ("iter", "f", "gradnorm", "diverged"), rows)
    print(f"{method} on {problem.name}: {tr.iterations} iterations, final f = {tr.fvals[-1]:.6g}, "
          f"reason = {tr.reason}; wrote {cfg['output']}")
    return EXIT_OK


def cmd_tune(cfg) -> int:
    methods = cfg["method"]
    for m in methods:
        _check_method(m)
    problem = _build_problem(cfg)
    trials, best, hist_rows = [], {}, []
    for m in methods:
        res = random_search(problem, m, cfg["budget"], cfg["trial_iters"], cfg["seed"])
        trials.extend(res.trials)
        best[m] = {"params": asdict(res.best.params), "score": res.best.score,
                   "all_diverged": res.all_diverged, "index": res.best.index, "seed": res.best.seed}
        for p in METHOD_PARAMS[m]:
            if p not in PARAM_NAMES:
                continue
            h = histogram(res.trials, p, cfg["bins"])
            for lo, hi, c in zip(h.edges[:-1], h.edges[1:], h.counts):
                hist_rows.append((m, p, lo, hi, c, h.log_scale, h.empty))
            if h.log_scale and h.zero_count:
                hist_rows.append((m, p, 0.0, 0.0, h.zero_count, False, h.empty))
    prefix = cfg["prefix"]
    meta = {"problem": problem.name, "dim": problem.dim, "budget": cfg["budget"],
            "trial_iters": cfg["trial_iters"], "seed": cfg["seed"], "best": best}
    write_trials_csv(f"{prefix}_trials.csv", trials)
    write_json(f"{prefix}_best.json", meta)
    write_csv(f"{prefix}_hist.csv", ("method", "param", "bin_lo", "bin_hi", "count", "log10", "empty"), hist_rows)
    for m, b in best.items():
        print(f"{m}: best score {b['score']:.6g} with {b['params']}")
    return EXIT_OK


def cmd_stability(cfg) -> int:
    from . import stability as st

    methods = cfg["methods"]
    for m in methods:
        if m not in st.STABILITY_METHODS:
            raise ConfigError(f"stability methods are {st.STABILITY_METHODS}, got {m!r}")
    hs = np.linspace(cfg["h_max"] / cfg["h_points"], cfg["h_max"], cfg["h_points"])
    locus = [row for m in methods for row in st.eigen_locus(m, hs, cfg["gamma"], cfg["m"], cfg["lam"])]
    write_csv(cfg["locus_output"], ("method", "h", "re1", "im1", "re2", "im2", "rho"), locus)
    table = st.threshold_table(cfg["mus"], methods, cfg["m"], cfg["lam"], cfg["tol"])
    write_csv(cfg["threshold_output"], ("mu", "method", "h_analytic", "h_empirical"), table)
    for row in table:
        print(f"mu={row['mu']:g} {row['method']}: analytic {row['h_analytic']:.6g}, "
              f"empirical {row['h_empirical']:.6g}")
    return EXIT_OK


def cmd_diagnose(cfg) -> int:
    from .checks import run_checks

    results = run_checks(include_benchmarks=cfg["full"])
    hard_ok = all(r.passed for r in results if not r.soft)
    report = {"passed": hard_ok, "benchmarks_included": cfg["full"],
              "checks": [r.to_dict() for r in results]}
    write_json(cfg["output"], report)
    for r in results:
        print(r.line())
    return EXIT_OK if hard_ok else EXIT_FAIL


def cmd_matcomp(cfg) -> int:
    methods = cfg["methods"]
    for m in methods:
        _check_method(m)
    inst = matcomp_generate(cfg["n"], cfg["r"], cfg["s"], cfg["seed"])
    rows = []
    for m in methods:
        if cfg["tune"]:
            params = matcomp_search(inst, m, cfg["budget"], cfg["iters"], cfg["seed"],
                                    init_seed=cfg["init_seed"]).best.params
        else:
            params = _params_for_all(cfg, m)
        tr = alternating_minimize(inst, m, params, cfg["iters"], init_seed=cfg["init_seed"])
        last = len(tr.fvals) - 1
        rows.extend((m, k, f, tr.diverged and k == last) for k, f in enumerate(tr.fvals))
        print(f"{m}: final loss {tr.fvals[-1]:.6g}{' (diverged)' if tr.diverged else ''}")
    write_csv(cfg["output"], ("method", "iter", "loss", "diverged"), rows)
    return EXIT_OK


def cmd_list(cfg) -> int:
    for name, (factory, dim_kw) in REGISTRY.items():
        p = factory()
        kind = f"dim {p.dim}" + (f" (set with --dim)" if dim_kw else "")
        fmin = "" if p.known_min is None else f", min f = {p.known_min[1]:g}"
        print(f"{name:16s} {kind}{fmin}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "tune": cmd_tune, "stability": cmd_stability,
            "diagnose": cmd_diagnose, "matcomp": cmd_matcomp, "list": cmd_list}

HELP = {
    "run": "run one optimizer and write a per-iteration trace CSV",
    "tune": "random-search hyperparameters; write trials, best params and histograms",
    "stability": "eigenvalue loci and step-size thresholds on a 1-D quadratic",
    "diagnose": "structural checks; exits nonzero if any hard check fails",
    "matcomp": "alternating minimization for low-rank matrix completion",
    "list": "list the registered problems",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="confopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, schema in SCHEMA.items():
        sp = sub.add_parser(name, help=HELP[name], argument_default=argparse.SUPPRESS)
        sp.add_argument("--config", help="file of 'key = value' lines")
        for key, (typ, default) in schema.items():
            flag = "--" + key.replace("_", "-")
            if typ is _bool:
                sp.add_argument(flag, nargs="?", const="true", dest=key, help=f"(default {default})")
            else:
                sp.add_argument(flag, dest=key, help=f"(default {default})")
    sub.add_parser("list", help=HELP["list"])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config", None)
    try:
        cfg = resolve_config(command, args, config_path) if command in SCHEMA else {}
        return COMMANDS[command](cfg)
    except (ConfigError, ParameterError, KeyError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"confopt {command}: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
