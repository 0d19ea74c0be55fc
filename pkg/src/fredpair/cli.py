"""Config-driven command line front end.

Exit codes: 0 success, 1 usage or config error, 2 route disagreement,
calibration failure, formula mismatch or rank-gap failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
import warnings
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .bordism import (bordism_index, chain_index, flat_image_check, graph_pair_index,
                      restricted_bordism_report)
from .errors import (ArgumentError, CalibrationError, FredpairError, InconsistencyError)
from .parallel import thread_count
from .planar import (RAW, build_correspondence, calibrate_conventions, clear_cache,
                     cp1_chain, domain_from_record, verify_surface_formula)
from .rh_index import kappa
from .subspace import BACKENDS, DEFAULT_TOL, gap_monitor, pair_index, span
from .symbols import LaurentSymbol, winding_curve

KINDS = ("symbol-index", "pair", "bordism", "surface", "chain", "verify")
CONFIG_KEYS = {"kind", "payload", "window", "tol", "backend", "seed"}
DEFAULTS = {"window": 32, "tol": DEFAULT_TOL, "backend": "float", "seed": 0}
PAYLOAD_KEYS = {
    "symbol-index": {"symbol", "curve_points"},
    "pair": {"ambient", "u", "v"},
    "bordism": {"domain", "symbol", "calibrated"},
    "surface": {"domain", "g"},
    "chain": {"domains", "preset", "cuts", "calibrated"},
    "verify": {"level", "only"},
}
EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser():
    p = _Parser(prog="fredpair", description="Fredholm pair and bordism index computations.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        s = sub.add_parser(kind)
        s.add_argument("--config", type=Path)
        s.add_argument("--window", type=int)
        s.add_argument("--tol", type=float)
        s.add_argument("--backend", choices=BACKENDS)
        s.add_argument("--seed", type=int)
        s.add_argument("--out", type=Path)
        if kind == "verify":
            s.add_argument("--level", choices=("quick", "full"))
            s.add_argument("--only", help="comma-separated criterion numbers")
        if kind == "symbol-index":
            s.add_argument("--csv", action="store_true", help="export the winding curve")
    return p


# config ------------------------------------------------------------------

def resolve_config(args) -> dict:
    raw = {}
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("config must be a JSON object")
    extra = set(raw) - CONFIG_KEYS
    if extra:
        raise UsageError(f"unknown config fields {sorted(extra)}")
    if raw.get("kind", args.kind) != args.kind:
        raise UsageError(f"config kind {raw['kind']!r} does not match subcommand {args.kind!r}")
    cfg = {"kind": args.kind, **DEFAULTS}
    cfg.update({k: v for k, v in raw.items() if k != "payload"})
    for key in ("window", "tol", "backend", "seed"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    payload = dict(raw.get("payload") or {})
    if args.kind == "verify":
        if args.level is not None:
            payload["level"] = args.level
        if args.only is not None:
            try:
                payload["only"] = [int(x) for x in args.only.split(",") if x.strip()]
            except ValueError:
                raise UsageError("--only takes comma-separated integers") from None
        payload.setdefault("level", "quick")
        payload.setdefault("only", [])
    extra = set(payload) - PAYLOAD_KEYS[args.kind]
    if extra:
        raise UsageError(f"unknown payload fields {sorted(extra)} for {args.kind}")
    cfg["payload"] = payload
    _validate(cfg)
    return cfg


def _validate(cfg):
    if not isinstance(cfg["window"], int) or isinstance(cfg["window"], bool) or cfg["window"] < 1:
        raise UsageError("window must be a positive integer")
    if not isinstance(cfg["tol"], (int, float)) or not 0 < cfg["tol"]:
        raise UsageError("tol must be a positive number")
    if cfg["backend"] not in BACKENDS:
        raise UsageError(f"backend must be one of {BACKENDS}")
    if not isinstance(cfg["seed"], int):
        raise UsageError("seed must be an integer")
    if cfg["kind"] == "verify" and cfg["payload"]["level"] not in ("quick", "full"):
        raise UsageError("level must be quick or full")


def _need(payload, key, kind):
    if key not in payload:
        raise UsageError(f"{kind} payload needs {key!r}")
    return payload[key]


def _entry(x, exact):
    if isinstance(x, str):
        try:
            f = Fraction(x)
        except ValueError:
            raise UsageError(f"bad number {x!r}") from None
        return f if exact else complex(float(f))
    if isinstance(x, (list, tuple)) and len(x) == 2:
        if exact:
            return (Fraction(x[0]), Fraction(x[1]))
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return x if exact else complex(x)
    raise UsageError(f"bad vector entry {x!r}")


def _vectors(rows, ambient, backend):
    exact = backend == "rational"
    cols = []
    for v in rows:
        if not isinstance(v, list) or len(v) != ambient:
            raise UsageError(f"vector {v!r} does not have length {ambient}")
        cols.append([_entry(x, exact) for x in v])
    if not cols:
        return np.zeros((ambient, 0), dtype=object if exact else complex)
    return np.array(cols, dtype=object if exact else complex).T


# runners -------------------------------------------------------------------

def run_symbol_index(cfg, out_dir, want_csv):
    p = cfg["payload"]
    phi = LaurentSymbol.from_literal(_need(p, "symbol", "symbol-index"))
    rep = kappa(phi, cfg["window"], cfg["tol"], cfg["backend"])
    result = rep.as_dict()
    if want_csv:
        points = int(p.get("curve_points", 1024))
        curve = winding_curve(phi, points)
        if out_dir is None:
            raise UsageError("--csv needs --out")
        path = out_dir / "winding.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta", "re_det", "im_det", "unwrapped_phase"])
            for row in curve:
                w.writerow([repr(float(x)) for x in row])
        result["winding_csv"] = path.name
    return result, True


def run_pair(cfg):
    p = cfg["payload"]
    n = _need(p, "ambient", "pair")
    if not isinstance(n, int) or n < 1:
        raise UsageError("ambient must be a positive integer")
    u = span(_vectors(_need(p, "u", "pair"), n, cfg["backend"]), n, cfg["tol"], cfg["backend"])
    v = span(_vectors(_need(p, "v", "pair"), n, cfg["backend"]), n, cfg["tol"], cfg["backend"])
    res = pair_index(u, v)
    return {"dim_u": u.dim, "dim_v": v.dim, **res.as_dict()}, True


def _calibration(flag):
    return calibrate_conventions() if flag else RAW


def run_bordism(cfg):
    p = cfg["payload"]
    if ("domain" in p) == ("symbol" in p):
        raise UsageError("bordism payload needs exactly one of 'domain' or 'symbol'")
    if "symbol" in p:
        phi = LaurentSymbol.from_literal(p["symbol"])
        idx = graph_pair_index(phi, cfg["window"], cfg["tol"], cfg["backend"])
        return {"graph_pair_index": idx}, True
    cal = _calibration(p.get("calibrated", False))
    dom = domain_from_record(p["domain"], cfg["window"])
    c = build_correspondence(dom, cal, cfg["tol"])
    res = bordism_index(c)
    rb = restricted_bordism_report(c)
    return {"calibration": cal.as_dict(), "pair": res.as_dict(),
            "flat_image": flat_image_check(c).as_dict(),
            "restricted": {"defect_dim": rb.defect_dim,
                           "complementary_rank": rb.complementary_rank}}, True


def run_surface(cfg):
    p = cfg["payload"]
    if p.get("g", 0) != 0:
        raise UsageError("only genus 0 domains can be constructed")
    cal = calibrate_conventions()
    dom = domain_from_record(_need(p, "domain", "surface"), cfg["window"])
    chk = verify_surface_formula(dom, cal, cfg["tol"])
    return {"calibration": cal.as_dict(), **chk.as_dict()}, chk.match


def run_chain(cfg):
    p = cfg["payload"]
    cal = _calibration(p.get("calibrated", False))
    if ("domains" in p) == ("preset" in p):
        raise UsageError("chain payload needs exactly one of 'domains' or 'preset'")
    if "preset" in p:
        if p["preset"] != "cp1":
            raise UsageError(f"unknown chain preset {p['preset']!r}")
        cuts = tuple(p.get("cuts", (0, 0)))
        if len(cuts) != 2 or not all(isinstance(k, int) for k in cuts):
            raise UsageError("cp1 cuts must be two integers")
        chain = cp1_chain(2.0, 1.0, cfg["window"], cuts, cal, cfg["tol"])
    else:
        chain = [build_correspondence(domain_from_record(d, cfg["window"]), cal, cfg["tol"])
                 for d in p["domains"]]
    rep = chain_index(chain)
    return {"calibration": cal.as_dict(), **rep.as_dict()}, True


def run_verify(cfg, echo):
    from .verify import run_battery
    p = cfg["payload"]
    results = run_battery(p["level"], cfg["tol"], cfg["seed"], set(p["only"]) or None, echo)
    return {"criteria": [r.as_dict() for r in results],
            "passed": sum(r.passed for r in results), "total": len(results)}, \
        all(r.passed for r in results)


def execute(cfg, out_dir=None, want_csv=False, echo=None):
    kind = cfg["kind"]
    if kind == "symbol-index":
        return run_symbol_index(cfg, out_dir, want_csv)
    if kind == "pair":
        return run_pair(cfg)
    if kind == "bordism":
        return run_bordism(cfg)
    if kind == "surface":
        return run_surface(cfg)
    if kind == "chain":
        return run_chain(cfg)
    return run_verify(cfg, echo)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if np.isfinite(x) else None
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        thread_count()
        cfg = resolve_config(args)
    except (UsageError, ArgumentError) as exc:
        print(f"fredpair: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = args.out
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    echo = (lambda s: print(s, flush=True)) if cfg["kind"] == "verify" else None
    clear_cache()
    start = time.perf_counter()
    status = "ok"
    with gap_monitor() as mon, warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            result, ok = execute(cfg, out_dir, getattr(args, "csv", False), echo)
        except UsageError as exc:
            print(f"fredpair: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except InconsistencyError as exc:
            result, ok, status = {"error": str(exc), "report": exc.report.as_dict()}, False, \
                "route disagreement"
        except CalibrationError as exc:
            result, ok, status = {"error": str(exc)}, False, "calibration failure"
        except ArgumentError as exc:
            print(f"fredpair: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except FredpairError as exc:
            result, ok, status = {"error": str(exc)}, False, type(exc).__name__
    gap_failed = (any(c["gaps"]["flagged"] for c in result.get("criteria", []))
                  if cfg["kind"] == "verify" else mon.flagged)
    if gap_failed:
        ok = False
        status = "rank-gap failure"
    elif not ok and status == "ok":
        status = "check failed"
    report = _jsonable({
        "config": cfg,
        "status": status,
        "result": result,
        "rank_gaps": mon.as_dict(),
        "timestamp": {"utc": datetime.now(timezone.utc).isoformat(),
                      "seconds": round(time.perf_counter() - start, 3)},
    })
    text = json.dumps(report, indent=2, sort_keys=True)
    if out_dir is not None:
        (out_dir / "report.json").write_text(text + "\n")
    if cfg["kind"] != "verify":
        print(text)
    elif "passed" in result:
        print(f"{result['passed']}/{result['total']} criteria passed")
    if not ok:
        print(f"fredpair: {status}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL
