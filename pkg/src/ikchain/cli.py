"""Batch driver: read a run configuration, execute suites, write YAML reports.

Usage::

    ikchain run configs/default.yaml [--seed S] [--tolerance T] [--out DIR]
                                     [--n-sites N] [--eta RE,IM]
    ikchain list-suites
    ikchain describe SUITE

Exit status: 0 when every case passes, 1 when any case fails, 2 for
configuration or parameter errors. The environment variable
IKCHAIN_OUTPUT_DIR overrides the configured output directory; ``--out``
overrides both.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

from . import __version__
from .errors import ConfigParse, DegenerateParams, SizeGuard
from .kernel import ModelParams, random_params
from .suites import REGISTRY, SUITES, BetheSettings, SuiteContext, suite_index, suite_rng

OUTPUT_ENV = "IKCHAIN_OUTPUT_DIR"
MAX_SITES = 5
DEFAULT_ETA = complex(0.3, 0.1)
# stream used to draw theta when the configuration leaves it out
THETA_STREAM = len(REGISTRY)


# ---------------------------------------------------------------- YAML format

class _Dumper(yaml.SafeDumper):
    pass


class _Pair(list):
    """A [re, im] pair, written in flow style."""


def _float(dumper, value: float):
    if value != value:
        text = ".nan"
    elif value in (float("inf"), float("-inf")):
        text = ".inf" if value > 0 else "-.inf"
    else:
        mantissa, _, exponent = ("%.17g" % value).partition("e")
        if "." not in mantissa:
            mantissa += ".0"
        text = mantissa + ("e" + exponent if exponent else "")
    return dumper.represent_scalar("tag:yaml.org,2002:float", text)


def _pair(dumper, value):
    return dumper.represent_sequence("tag:yaml.org,2002:seq", value, flow_style=True)


_Dumper.add_representer(float, _float)
_Dumper.add_representer(_Pair, _pair)


def to_plain(obj: Any) -> Any:
    """Convert numpy scalars, complex numbers and tuples to YAML-safe values."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return _Pair([float(obj.real), float(obj.imag)])
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_plain(v) for v in obj]
    return obj


def dump_yaml(data: Any) -> str:
    return yaml.dump(to_plain(data), Dumper=_Dumper, sort_keys=False, allow_unicode=True, width=120)


def write_yaml(path: Path, data: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_yaml(data))


def parse_complex(value: Any, what: str) -> complex:
    """Accept [re, im], a real number, or the string 're,im'."""
    if isinstance(value, str):
        parts = value.split(",")
        if len(parts) != 2:
            raise ConfigParse(f"{what}: expected 're,im', got {value!r}")
        value = parts
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigParse(f"{what}: expected a [re, im] pair, got {value!r}")
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError) as exc:
            raise ConfigParse(f"{what}: non-numeric pair {value!r}") from exc
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise ConfigParse(f"{what}: expected a [re, im] pair, got {value!r}")


# ---------------------------------------------------------------- configuration

@dataclass
class RunConfig:
    eta: complex = DEFAULT_ETA
    n_sites: int = 2
    theta: tuple[complex, ...] | None = None
    tolerance: float | None = None
    seed: int = 0
    suites: list[str] = field(default_factory=lambda: [s.name for s in REGISTRY])
    output_path: str = "reports"
    bethe: BetheSettings = field(default_factory=BetheSettings)

    def validate(self) -> None:
        for name in self.suites:
            if name not in SUITES:
                raise ConfigParse(f"unknown suite {name!r}; run 'ikchain list-suites' for the registry")
        if not isinstance(self.n_sites, int) or self.n_sites < 1:
            raise ConfigParse(f"n_sites must be a positive integer, got {self.n_sites!r}")
        if self.n_sites > MAX_SITES:
            raise SizeGuard(f"n_sites={self.n_sites} exceeds the dense limit of {MAX_SITES}; "
                            f"use n_sites <= {MAX_SITES}")
        for name in self.suites:
            limit = SUITES[name].max_sites
            if self.n_sites > limit:
                raise SizeGuard(f"suite {name!r} supports n_sites <= {limit}; "
                                f"lower n_sites or drop the suite")
        if self.theta is not None and len(self.theta) != self.n_sites:
            raise ConfigParse(f"theta has {len(self.theta)} entries but n_sites={self.n_sites}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigParse("tolerance must be positive")
        if self.seed < 0:
            raise ConfigParse("seed must be a non-negative integer")

    def model_params(self) -> ModelParams:
        if self.theta is None:
            rng = np.random.Generator(np.random.PCG64(THETA_STREAM ^ self.seed))
            return random_params(rng, self.n_sites, self.eta, seed=self.seed)
        return ModelParams(self.eta, self.n_sites, self.theta, seed=self.seed)

    def echo(self, params: ModelParams) -> dict[str, Any]:
        return {
            "eta": params.eta,
            "n_sites": params.n_sites,
            "theta": list(params.theta),
            "tolerance": self.tolerance,
            "seed": self.seed,
            "bethe": {
                "n": self.bethe.n,
                "guesses": self.bethe.guesses,
                "sample_points": self.bethe.sample_points,
            },
        }


def _int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigParse(f"{what}: expected an integer, got {value!r}")
    return value


def config_from_dict(data: Any) -> RunConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigParse("configuration must be a mapping")
    unknown = set(data) - {"params", "suites", "output_path", "bethe"}
    if unknown:
        raise ConfigParse(f"unknown top-level keys: {sorted(unknown)}")
    cfg = RunConfig()
    params = data.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigParse("params must be a mapping")
    unknown = set(params) - {"eta", "n_sites", "theta", "tolerance", "seed"}
    if unknown:
        raise ConfigParse(f"unknown params keys: {sorted(unknown)}")
    if "eta" in params:
        cfg.eta = parse_complex(params["eta"], "params.eta")
    if "n_sites" in params:
        cfg.n_sites = _int(params["n_sites"], "params.n_sites")
    if params.get("theta") is not None:
        if not isinstance(params["theta"], list):
            raise ConfigParse("params.theta must be a list of [re, im] pairs")
        cfg.theta = tuple(parse_complex(t, f"params.theta[{k}]") for k, t in enumerate(params["theta"]))
    if params.get("tolerance") is not None:
        try:
            cfg.tolerance = float(params["tolerance"])
        except (TypeError, ValueError) as exc:
            raise ConfigParse(f"params.tolerance: not a number: {params['tolerance']!r}") from exc
    if "seed" in params:
        cfg.seed = _int(params["seed"], "params.seed")
    if "suites" in data:
        suites = data["suites"]
        if not isinstance(suites, list) or not all(isinstance(s, str) for s in suites):
            raise ConfigParse("suites must be a list of suite names")
        cfg.suites = list(suites)
    if "output_path" in data:
        cfg.output_path = str(data["output_path"])
    if data.get("bethe") is not None:
        b = data["bethe"]
        if not isinstance(b, dict):
            raise ConfigParse("bethe must be a mapping")
        settings = BetheSettings()
        if "n" in b:
            settings.n = _int(b["n"], "bethe.n")
            if settings.n < 0:
                raise ConfigParse("bethe.n must be non-negative")
        if b.get("guesses") is not None:
            guesses = []
            for k, g in enumerate(b["guesses"]):
                if not isinstance(g, list) or len(g) != settings.n:
                    raise ConfigParse(f"bethe.guesses[{k}] must list {settings.n} [re, im] pairs")
                guesses.append([parse_complex(z, f"bethe.guesses[{k}]") for z in g])
            settings.guesses = guesses
        if b.get("sample_points") is not None:
            settings.sample_points = [parse_complex(z, f"bethe.sample_points[{k}]")
                                      for k, z in enumerate(b["sample_points"])]
        cfg.bethe = settings
    return cfg


def load_config(path: str | os.PathLike) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigParse(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigParse(f"malformed config {path}: {exc}") from exc
    return config_from_dict(data)


# ---------------------------------------------------------------- running

def run_suite(name: str, cfg: RunConfig, params: ModelParams) -> dict[str, Any]:
    """Run one suite and return its report as a plain mapping."""
    entry = SUITES[name]
    ctx = SuiteContext(params, suite_rng(name, cfg.seed), cfg.tolerance, cfg.bethe)
    start = time.perf_counter()
    result = entry.run(ctx)
    elapsed = (time.perf_counter() - start) * 1e3
    cases = [
        {"id": c.id, "inputs": c.inputs, "residual": float(c.residual),
         "tolerance": float(c.tolerance), "pass": c.passed}
        for c in result.cases
    ]
    echo = cfg.echo(params)
    echo["suite_index"] = suite_index(name)
    return {
        "suite": name,
        "version": __version__,
        "passed": all(c["pass"] for c in cases),
        "n_cases": len(cases),
        "n_failed": sum(not c["pass"] for c in cases),
        "worst_residual": max((c["residual"] for c in cases), default=0.0),
        "config_echo": echo,
        "cases": cases,
        "notes": result.notes,
        "timing_ms": elapsed,
    }


def run(cfg: RunConfig, out_dir: str | os.PathLike | None = None) -> tuple[int, list[dict[str, Any]]]:
    """Run every configured suite, write reports, return (exit status, reports)."""
    cfg.validate()
    params = cfg.model_params()
    out = Path(out_dir if out_dir is not None else cfg.output_path)
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    for name in cfg.suites:
        report = run_suite(name, cfg, params)
        write_yaml(out / f"{name}.yaml", report)
        reports.append(report)
    summary = {
        "version": __version__,
        "passed": all(r["passed"] for r in reports),
        "config_echo": cfg.echo(params),
        "suites": [
            {"suite": r["suite"], "passed": r["passed"], "n_cases": r["n_cases"],
             "n_failed": r["n_failed"], "worst_residual": r["worst_residual"], "timing_ms": r["timing_ms"]}
            for r in reports
        ],
    }
    write_yaml(out / "summary.yaml", summary)
    return (0 if summary["passed"] else 1), reports


def _summary_lines(reports: Sequence[dict[str, Any]]) -> list[str]:
    lines = []
    for r in reports:
        status = "PASS" if r["passed"] else "FAIL"
        lines.append(f"{status}  {r['suite']:<15} cases={r['n_cases']:<5} failed={r['n_failed']:<4} "
                     f"worst={r['worst_residual']:.2e}  {r['timing_ms']:.0f} ms")
    return lines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ikchain", description="Verification suites for the A2(2) spin chain.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run the suites listed in a config file")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--tolerance", type=float)
    p_run.add_argument("--out")
    p_run.add_argument("--n-sites", type=int)
    p_run.add_argument("--eta", help="crossing parameter as 're,im'")
    sub.add_parser("list-suites", help="print the suite registry")
    p_desc = sub.add_parser("describe", help="describe one suite")
    p_desc.add_argument("suite")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-suites":
        for entry in REGISTRY:
            print(f"{entry.name:<15} {entry.description}")
        return 0
    if args.command == "describe":
        entry = SUITES.get(args.suite)
        if entry is None:
            print(f"error: unknown suite {args.suite!r}", file=sys.stderr)
            return 2
        print(f"{entry.name}\n  {entry.description}\n  default tolerance: {entry.tolerance}\n"
              f"  max n_sites: {entry.max_sites}\n  stream index: {suite_index(entry.name)}")
        return 0
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.tolerance is not None:
            cfg.tolerance = args.tolerance
        if args.eta is not None:
            cfg.eta = parse_complex(args.eta, "--eta")
        if args.n_sites is not None:
            if cfg.theta is not None and len(cfg.theta) != args.n_sites:
                cfg.theta = None
            cfg.n_sites = args.n_sites
        out = args.out or os.environ.get(OUTPUT_ENV) or cfg.output_path
        status, reports = run(cfg, out)
    except (ConfigParse, DegenerateParams, SizeGuard) as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 2
    for line in _summary_lines(reports):
        print(line)
    print(f"reports written to {out}")
    return status


if __name__ == "__main__":
    sys.exit(main())
