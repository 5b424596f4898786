"""Command-line front end: identity batteries, integral checks, sweeps and golden fixtures.

Exit status: 0 all checks pass, 1 numerical failure, 2 domain violation,
3 configuration error.  Every report starts with the resolved configuration
(including sampled parameters) so a run can be reproduced from its output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import golden
from .errors import ConfigError, DomainError, PoleError
from .identities import REGISTRY, run_battery, sample_params, serialize
from .integrals import eval_integral, telescope_check
from .kernels.domain import annulus_clear, validate_domain
from .kernels.params import (
    AnParams,
    AnSymParams,
    CnParams,
    DnParams,
    Family,
    ModifiedParams,
    QReducedParams,
    RootSystem,
    UnivariateParams,
)
from .quadrature import GridOptions
from .special import BaseSet, OmegaTriple

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_CONFIG = 0, 1, 2, 3

MODES = ("identities", "integral", "telescope", "sweep", "golden")
PHI = (1 + 5**0.5) / 2
DEFAULT_BASES = {"q": 0.3, "p": 0.2}
# A_n parameters drawn from the default range only survive a q-shift when q is
# large and p tiny; these bases admit sampled telescopes for every family.
TELESCOPE_BASES = {"q": 0.6, "p": 0.02}
DEFAULT_OMEGA = {"unit": (1.0, PHI, 3j), "q": (1.0, 1 - 0.4j, 5j)}

_UNIT = {Family.CN_UNIT: RootSystem.CN, Family.AN_UNIT: RootSystem.AN, Family.DN_UNIT: RootSystem.DN}
_LINE = {Family.CN_Q: RootSystem.CN, Family.AN_Q: RootSystem.AN, Family.DN_Q: RootSystem.DN}


@dataclass
class RunConfig:
    mode: str
    family: str = "univariate"
    n: int = 1
    seed: int = 0
    params: Optional[Dict] = None
    bases: Optional[Dict] = None
    omega: Optional[List] = None
    grid: Dict = field(default_factory=dict)
    tol: Optional[float] = None
    samples: int = 100
    identities: Optional[List[str]] = None
    group: Optional[str] = None
    shift: str = "q"
    sweep: Dict = field(default_factory=dict)
    out: Optional[str] = None
    force: bool = False

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("force")
        return serialize(d)


# ---------------------------------------------------------------------------
# config parsing


def _cnum(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ConfigError(f"complex numbers are [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float, complex)):
        return complex(x)
    raise ConfigError(f"not a number: {x!r}")


def _clist(xs) -> List[complex]:
    if not isinstance(xs, list):
        raise ConfigError(f"expected a list of numbers, got {xs!r}")
    return [_cnum(x) for x in xs]


_CONFIG_KEYS = set(RunConfig.__dataclass_fields__) - {"mode", "out", "force"}


def load_config(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS - {"mode"}
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return doc


# The line contour needs one doubling past the torus default at n=2 before the
# convergence test can confirm the result; the extra level costs a few seconds.
LINE_N2_MAX_POINTS = 2048


def grid_options(cfg: RunConfig) -> GridOptions:
    allowed = {"initial_points", "max_points", "rel_tol", "line_halfwidth"}
    bad = set(cfg.grid) - allowed
    if bad:
        raise ConfigError(f"unknown grid options: {', '.join(sorted(bad))}")
    grid = dict(cfg.grid)
    if "max_points" not in grid and cfg.family in {f.value for f in _LINE} and cfg.n == 2:
        grid["max_points"] = LINE_N2_MAX_POINTS
    try:
        return GridOptions(**grid)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _family(cfg: RunConfig) -> Family:
    try:
        return Family(cfg.family)
    except ValueError:
        raise ConfigError(f"unknown family {cfg.family!r}; choose from {', '.join(f.value for f in Family)}") from None


def _bases(cfg: RunConfig) -> BaseSet:
    b = cfg.bases or DEFAULT_BASES
    try:
        return BaseSet(_cnum(b["q"]), _cnum(b["p"]))
    except KeyError as exc:
        raise ConfigError("bases need both q and p") from exc


def _omega(cfg: RunConfig, fam: Family) -> OmegaTriple:
    w = cfg.omega if cfg.omega is not None else DEFAULT_OMEGA["unit" if fam in _UNIT else "q"]
    w = _clist(list(w)) if isinstance(w, list) else [complex(x) for x in w]
    if len(w) != 3:
        raise ConfigError("omega must have three entries")
    return OmegaTriple(*w)


def build_params(cfg: RunConfig, accept=None):
    """Parameters and bases (or omega triple) of the run, explicit or sampled from the seed.

    ``accept(par, where)`` further restricts sampled parameters.
    """
    fam = _family(cfg)
    where = _omega(cfg, fam) if fam in _UNIT or fam in _LINE else _bases(cfg)
    if cfg.params is None:
        extra = None if accept is None else (lambda c: accept(c, where))
        return sample_params(fam, where, cfg.seed, n=cfg.n, accept=extra), where
    p = cfg.params
    try:
        if fam is Family.UNIVARIATE:
            par = UnivariateParams(_clist(p["t"]))
        elif fam is Family.CN:
            t = _clist(p["t"])
            par = CnParams((len(t) - 3) // 2, t)
        elif fam is Family.AN:
            t = _clist(p["t"])
            par = AnParams(len(t) - 1, t, _clist(p["s"]))
        elif fam is Family.AN_SYM:
            t = _clist(p["t"])
            par = AnSymParams(len(t) - 2, t, _clist(p["s"]))
        elif fam is Family.DN:
            t = _clist(p["t"])
            par = DnParams(len(t), t, _clist(p["s"]))
        else:
            root = _UNIT.get(fam) or _LINE[fam]
            cls = ModifiedParams if fam in _UNIT else QReducedParams
            par = cls(root, _clist(p["g"]), _clist(p.get("h", [])), where)
    except KeyError as exc:
        raise ConfigError(f"family {fam.value} needs parameter {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return par, where


def params_echo(par) -> dict:
    if isinstance(par, (ModifiedParams, QReducedParams)):
        return {"g": serialize(par.g), "h": serialize(par.h)}
    out = {"t": serialize(par.t)}
    if hasattr(par, "s"):
        out["s"] = serialize(par.s)
    return out


# ---------------------------------------------------------------------------
# output


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, allow_nan=True)


def default_tolerance(fam: Family, n: int) -> float:
    if fam in (Family.UNIVARIATE, Family.CN, Family.AN):
        return 1e-8 if n == 1 else 1e-6
    if fam in (Family.AN_SYM, Family.DN):
        return 1e-7
    if fam in _LINE:
        return 1e-6 if n == 1 else 1e-5
    return 1e-6


# ---------------------------------------------------------------------------
# commands


def cmd_identities(cfg: RunConfig, registry=None) -> int:
    reg = REGISTRY if registry is None else registry
    selection = cfg.identities or [i for i, entry in reg.items() if cfg.group in (None, entry.group)]
    if not selection:
        raise ConfigError(f"no identities selected (group {cfg.group!r})")
    reports = run_battery(selection, cfg.samples, cfg.seed, cfg.tol, registry=reg)
    cfg = replace(cfg, identities=list(selection))
    lines = [_dumps({"config": cfg.echo()})]
    lines += [_dumps(r.to_json()) for r in reports]
    _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _resolved(cfg: RunConfig, par, where) -> RunConfig:
    extra = {"params": params_echo(par)}
    if isinstance(where, OmegaTriple):
        extra["omega"] = serialize(list(where.omegas))
    else:
        extra["bases"] = {"q": serialize(where.q), "p": serialize(where.p)}
    return replace(cfg, **extra)


def cmd_integral(cfg: RunConfig) -> int:
    par, where = build_params(cfg)
    cfg = _resolved(cfg, par, where)
    opt = grid_options(cfg)
    fam = _family(cfg)
    check = validate_domain(par, None if isinstance(where, OmegaTriple) else where)
    if not check.ok:
        report = {"config": cfg.echo(), "family": fam.value, "violations": list(check.violations), "passed": False}
        _emit(json.dumps(report, sort_keys=True, indent=1) + "\n", cfg.out)
        return EXIT_DOMAIN
    tol = cfg.tol if cfg.tol is not None else default_tolerance(fam, getattr(par, "n", 1))
    t0 = time.perf_counter()
    rec = eval_integral(par, None if isinstance(where, OmegaTriple) else where, opt)
    wall = time.perf_counter() - t0
    passed = rec.rel_err <= tol and rec.lhs.converged
    report = {
        "config": cfg.echo(),
        "family": fam.value,
        "n": getattr(par, "n", 1),
        "lhs": serialize(complex(rec.lhs.value)),
        "rhs": serialize(complex(rec.rhs)),
        "rel_err": rec.rel_err,
        "tolerance": tol,
        "points_per_dim": rec.lhs.points_per_dim,
        "converged": rec.lhs.converged,
        "err_estimate": rec.lhs.err_estimate,
        "halfwidth": rec.lhs.halfwidth,
        "boundary_ratio": rec.lhs.boundary_ratio,
        "wall_time_s": wall,
        "passed": passed,
    }
    _emit(json.dumps(report, sort_keys=True, indent=1) + "\n", cfg.out)
    return EXIT_OK if passed else EXIT_FAIL


def _telescope_admissible(par, b: BaseSet, shift: str) -> bool:
    if shift == "p":
        b = BaseSet(b.p, b.q)
    return validate_domain(par.scaled(0, b.q), b).ok and annulus_clear(par, b)


def cmd_telescope(cfg: RunConfig) -> int:
    fam = _family(cfg)
    if fam not in (Family.UNIVARIATE, Family.CN, Family.AN):
        raise ConfigError("telescope runs on the univariate, cn and an families")
    if cfg.shift not in ("q", "p"):
        raise ConfigError(f"shift must be 'q' or 'p', got {cfg.shift!r}")
    if cfg.bases is None:
        cfg = replace(cfg, bases=dict(TELESCOPE_BASES))
    par, b = build_params(cfg, accept=lambda c, b: _telescope_admissible(c, b, cfg.shift))
    cfg = _resolved(cfg, par, b)
    opt = grid_options(cfg)
    tol = cfg.tol if cfg.tol is not None else 1e-7
    try:
        res = telescope_check(par, b, opt, shift=cfg.shift)
    except DomainError as exc:
        report = {"config": cfg.echo(), "family": fam.value, "violations": [str(exc)], "passed": False}
        _emit(json.dumps(report, sort_keys=True, indent=1) + "\n", cfg.out)
        return EXIT_DOMAIN
    passed = res.residual <= tol and res.annulus_ok
    report = {
        "config": cfg.echo(),
        "family": fam.value,
        "shift": res.shift,
        "residual": res.residual,
        "tolerance": tol,
        "base_value": serialize(res.base_value),
        "shifted_value": serialize(res.shifted_value),
        "annulus_ok": res.annulus_ok,
        "passed": passed,
    }
    _emit(json.dumps(report, sort_keys=True, indent=1) + "\n", cfg.out)
    if not res.annulus_ok:
        return EXIT_DOMAIN
    return EXIT_OK if passed else EXIT_FAIL


def sweep_values(cfg: RunConfig, par) -> List[complex]:
    """The swept first parameter: explicit list, or a linear range start..stop in ``steps`` points."""
    sw = cfg.sweep or {}
    if "values" in sw:
        return _clist(sw["values"])
    if isinstance(par, QReducedParams):
        w2 = par.w.omega2
        first = par.g[0] / w2
        start = _cnum(sw.get("start", [first.real * 0.5, first.imag])) * w2
        stop = _cnum(sw.get("stop", [first.real * 1.5, first.imag])) * w2
    else:
        t1 = par.t[0]
        phase = t1 / abs(t1)
        start = _cnum(sw.get("start", 0.55 * phase))
        stop = _cnum(sw.get("stop", 0.85 * phase))
    steps = int(sw.get("steps", 20))
    if steps < 2:
        raise ConfigError("a sweep needs at least 2 steps")
    return [start + (stop - start) * k / (steps - 1) for k in range(steps)]


def cmd_sweep(cfg: RunConfig) -> int:
    from .integrals import sweep_t1

    par, where = build_params(cfg)
    if isinstance(par, ModifiedParams):
        raise ConfigError("sweeps run on the torus and line families")
    values = sweep_values(cfg, par)
    cfg = _resolved(cfg, par, where)
    cfg = replace(cfg, sweep={**(cfg.sweep or {}), "values": serialize(values)})
    opt = grid_options(cfg)
    fam = _family(cfg)
    tol = cfg.tol if cfg.tol is not None else (1e-5 if fam in _LINE else 1e-7)
    rows = sweep_t1(par, None if isinstance(where, OmegaTriple) else where, values, opt)
    buf = io.StringIO()
    buf.write("# " + _dumps({"config": cfg.echo()}) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["value_re", "value_im", "lhs_re", "lhs_im", "rel_err", "skipped", "violations"])
    lhs = []
    for row in rows:
        v = complex(row["value"])
        if row["skipped"]:
            writer.writerow([repr(v.real), repr(v.imag), "", "", "", 1, " | ".join(row["violations"])])
        else:
            lv = complex(row["lhs"])
            lhs.append(lv)
            writer.writerow([repr(v.real), repr(v.imag), repr(lv.real), repr(lv.imag), repr(row["rel_err"]), 0, ""])
    spread = sweep_spread(lhs)
    buf.write(f"# spread {spread!r} tolerance {tol!r}\n")
    _emit(buf.getvalue(), cfg.out)
    if not lhs:
        return EXIT_DOMAIN
    return EXIT_OK if spread <= tol else EXIT_FAIL


def sweep_spread(values: Sequence[complex]) -> float:
    """max |v_i - v_j| / |mean| over the evaluated rows."""
    if not values:
        return math.nan
    v = np.asarray(values)
    return float((np.max(np.abs(v[:, None] - v[None, :]))) / abs(np.mean(v)))


def cmd_golden(cfg: RunConfig) -> int:
    path = cfg.out or golden.DEFAULT_FIXTURE
    fresh = golden.regenerate(path, force=cfg.force)
    diffs = golden.compare_fast({r["name"]: r for r in fresh})
    worst = max(diffs.values())
    sys.stderr.write(f"wrote {len(fresh)} golden records to {path}; worst fast-path relative difference {worst:.3g}\n")
    return EXIT_OK if worst <= 1e-11 else EXIT_FAIL


COMMANDS = {
    "identities": cmd_identities,
    "integral": cmd_integral,
    "telescope": cmd_telescope,
    "sweep": cmd_sweep,
    "golden": cmd_golden,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ellbeta", description="Numerical checks of elliptic beta integrals")
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--family", help="integral family (identities: identity group)")
    parser.add_argument("--n", type=int, help="rank of the multivariable families")
    parser.add_argument("--seed", type=int, help="sampler seed")
    parser.add_argument("--tol", type=float, help="pass/fail tolerance override")
    parser.add_argument("--grid", type=int, help="maximum quadrature points per dimension")
    parser.add_argument("--samples", type=int, help="samples per identity")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out", help="report or fixture path (default: stdout / the test fixture)")
    parser.add_argument("--force", action="store_true", help="overwrite golden values that changed")
    return parser


def config_from_args(args) -> RunConfig:
    doc = load_config(args.config) if args.config else {}
    if "mode" in doc and doc["mode"] != args.mode:
        raise ConfigError(f"config is for mode {doc['mode']!r}, command is {args.mode!r}")
    doc = {k: v for k, v in doc.items() if k != "mode"}
    cfg = RunConfig(mode=args.mode, **doc)
    if args.family is not None:
        if args.mode == "identities":
            cfg.group = args.family
        else:
            cfg.family = args.family
    for name in ("n", "seed", "tol", "samples", "out"):
        v = getattr(args, name)
        if v is not None:
            setattr(cfg, name, v)
    if args.grid is not None:
        cfg.grid = {**cfg.grid, "max_points": args.grid}
    cfg.force = args.force
    if cfg.samples < 1:
        raise ConfigError("samples must be >= 1")
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.mode](cfg)
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    except (DomainError, PoleError) as exc:
        sys.stderr.write(f"domain violation: {exc}\n")
        return EXIT_DOMAIN
    except golden.GoldenConflict as exc:
        sys.stderr.write(f"{exc}\nrerun with --force to overwrite\n")
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
