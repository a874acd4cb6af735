"""Command-line front end: ``eggbergman verify <suite> [options]``.

Options may also come from a flat ``key = value`` file given with
``--config``; flags on the command line override it.  Reports go to
``<out>/report.jsonl`` (one object per check) and ``<out>/summary.csv``.

Exit status: 0 when every check passes, 1 when some check fails (their
names are printed to stderr), 2 for invalid usage or configuration.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

from .analysis import RegimeError, SpaceParams, choose_exponents
from .domain import EggDomain
from .kernel import RESIDUAL_TOL, KernelParams, KernelSolveError, coefficient_residual, solve_kernel_coefficients
from .report import write_csv, write_jsonl
from .suites import SUITES

__all__ = ["RunConfig", "ConfigError", "parse_config_file", "build_config", "solve_and_cache", "run_suite", "main"]

log = logging.getLogger("eggbergman")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    n: int = 1
    m: int = 1
    a: float = 1.0
    p: float = 2.0
    lam: float = 0.0
    sigma: float | None = None
    d: float | None = None
    samples: int | None = None
    seed: int = 0
    degree: int = 8
    grid: int = 10_000
    h_floor: float = 1e-6
    outer: int = 24
    suites: tuple = field(default_factory=tuple)
    out: str = "verify-out"
    cache_dir: str | None = None

    def validate(self) -> "RunConfig":
        """Check every parameter range before any suite runs."""
        try:
            EggDomain(self.n, self.m, self.a)
            sp = SpaceParams(self.p, self.lam)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not self.suites:
            raise ConfigError("no suite named")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}")
        if self.sigma is not None and not self.sigma > -1:
            raise ConfigError("sigma must exceed -1")
        if self.samples is not None and self.samples < 2:
            raise ConfigError("samples must be at least 2")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not 1 <= self.degree <= 32:
            raise ConfigError("degree must lie in [1, 32]")
        if self.grid < 1000:
            raise ConfigError("grid must be at least 1000 (three decades for the tail check)")
        if not 0 < self.h_floor < 1e-2:
            raise ConfigError("h-floor must lie in (0, 1e-2)")
        if self.outer < 3:
            raise ConfigError("outer must be at least 3")
        needs_regime = {"schur", "opnorm"} | ({"kernel", "lemma1", "lemma2"} if self.sigma is None else set())
        if needs_regime & set(self.suites):
            try:
                choose_exponents(sp, self.sigma, self.d if self.p > 1 else None)
            except RegimeError as exc:
                raise ConfigError(str(exc)) from exc
        # sigma as the gamma and lemma2 suites resolve it
        for suite, default in (("gamma", 1.0), ("lemma2", None)):
            if suite not in self.suites or self.d is None:
                continue
            s = self.sigma if self.sigma is not None else default
            if s is None:
                s = choose_exponents(sp).sigma
            if not 0 < self.d < s + 1:
                raise ConfigError(f"need 0 < d < sigma + 1 for {suite}, got d={self.d}, sigma={s}")
        return self


# -- configuration -----------------------------------------------------------

_KEYS = {
    "n": int, "m": int, "a": float, "p": float, "lambda": float, "sigma": float, "d": float,
    "samples": int, "seed": int, "degree": int, "grid": int, "h_floor": float, "outer": int,
    "suites": str, "out": str, "cache_dir": str,
}
_RENAME = {"lambda": "lam"}


def _convert(key: str, text: str):
    kind = _KEYS[key]
    if kind is int:
        # allow 1e6-style literals for budgets
        val = float(text)
        if val != int(val):
            raise ValueError(f"{key} must be an integer")
        return int(val)
    return kind(text)


def parse_config_file(path) -> dict:
    """Read ``key = value`` lines ('#' starts a comment); keys use flag names."""
    out = {}
    for num, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(f"{path}:{num}: unknown key {key!r}")
        try:
            out[key] = _convert(key, val)
        except ValueError as exc:
            raise ConfigError(f"{path}:{num}: {exc}") from exc
    return out


def _split_suites(items) -> tuple:
    names = []
    for item in items:
        for s in str(item).split(","):
            s = s.strip()
            if s == "all":
                names.extend(SUITES)
            elif s:
                names.append(s)
    return tuple(dict.fromkeys(names))


def build_config(values: dict) -> RunConfig:
    kw = {}
    for key, val in values.items():
        if val is None:
            continue
        kw[_RENAME.get(key, key)] = val
    if "suites" in kw and isinstance(kw["suites"], str):
        kw["suites"] = _split_suites([kw["suites"]])
    names = {f.name for f in fields(RunConfig)}
    extra = set(kw) - names
    if extra:
        raise ConfigError(f"unknown settings: {sorted(extra)}")
    return RunConfig(**kw).validate()


# -- kernel cache ------------------------------------------------------------

def _cache_path(cache_dir, d: EggDomain, sigma: float) -> Path:
    return Path(cache_dir) / f"kernel_n{d.n}_m{d.m}_a{d.a!r}_sigma{float(sigma)!r}.txt"


def solve_and_cache(d: EggDomain, sigma: float, cache_dir) -> KernelParams:
    """Load the kernel record for (d, sigma) from ``cache_dir`` or solve and store it.

    A cached record is used only if it names the same parameters and its
    coefficients still satisfy the reproducing system to RESIDUAL_TOL;
    otherwise it is recomputed with a warning.
    """
    sigma = float(sigma)
    if cache_dir is None:
        return solve_kernel_coefficients(d, sigma)
    path = _cache_path(cache_dir, d, sigma)
    if path.exists():
        try:
            kp = KernelParams.from_record(path.read_text(encoding="utf-8"))
            if kp.domain != d or kp.sigma != sigma:
                raise ValueError("record is for different parameters")
            res = coefficient_residual(kp)
            if not res <= RESIDUAL_TOL:
                raise ValueError(f"residual {res:.3e} exceeds {RESIDUAL_TOL:g}")
            return kp
        except (ValueError, OSError) as exc:
            log.warning("kernel cache %s unusable (%s); recomputing", path, exc)
    kp = solve_kernel_coefficients(d, sigma)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(kp.to_record(), encoding="utf-8")
    os.replace(tmp, path)
    return kp


# -- running -----------------------------------------------------------------

def run_suite(cfg: RunConfig, stream=None) -> tuple[int, list]:
    """Run every suite in ``cfg.suites`` in order and write the reports."""
    stream = sys.stderr if stream is None else stream
    d = EggDomain(cfg.n, cfg.m, cfg.a)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cache_dir = cfg.cache_dir if cfg.cache_dir is not None else out_dir / "kernel-cache"
    kernels = {}

    def kernel_for(sigma):
        if sigma not in kernels:
            kernels[sigma] = solve_and_cache(d, sigma, cache_dir)
        return kernels[sigma]

    reports = []
    for name in cfg.suites:
        reports.extend(SUITES[name](cfg, kernel_for))
    write_jsonl(reports, out_dir / "report.jsonl")
    write_csv(reports, out_dir / "summary.csv")
    failed = [f"{r.suite}/{r.check}" for r in reports if not r.passed]
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.suite}/{r.check}", file=stream)
    if failed:
        print("failing checks: " + ", ".join(failed), file=stream)
        return EXIT_FAIL, reports
    return EXIT_OK, reports


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eggbergman", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run verification suites",
                       description=f"Suites: {', '.join(SUITES)} (or 'all').")
    v.add_argument("suite", nargs="*", help="suite names (comma-separated lists allowed)")
    v.add_argument("--config", help="flat key = value file; flags override it")
    v.add_argument("--n", type=int)
    v.add_argument("--m", type=int)
    v.add_argument("--a", type=float)
    v.add_argument("--p", type=float)
    v.add_argument("--lambda", dest="lambda_", type=float)
    v.add_argument("--sigma", type=float)
    v.add_argument("--d", type=float)
    v.add_argument("--samples", type=lambda s: _convert("samples", s))
    v.add_argument("--seed", type=int)
    v.add_argument("--degree", type=int)
    v.add_argument("--grid", type=lambda s: _convert("grid", s))
    v.add_argument("--h-floor", dest="h_floor", type=float)
    v.add_argument("--outer", type=int, help="outer points per sup-scan")
    v.add_argument("--suites", help="comma-separated suite names")
    v.add_argument("--out", help="output directory")
    v.add_argument("--cache-dir", dest="cache_dir", help="kernel coefficient cache")
    v.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        values = parse_config_file(args.config) if args.config else {}
        flags = {k: getattr(args, k) for k in ("n", "m", "a", "p", "sigma", "d", "samples", "seed",
                                                "degree", "grid", "h_floor", "outer", "out", "cache_dir")}
        flags["lambda"] = args.lambda_
        values.update({k: v for k, v in flags.items() if v is not None})
        names = list(args.suite) + ([args.suites] if args.suites else [])
        if names:
            values["suites"] = _split_suites(names)
        cfg = build_config(values)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"eggbergman: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        code, _ = run_suite(cfg)
    except (KernelSolveError, RegimeError) as exc:
        print(f"eggbergman: error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
