"""Command-line front end.

    heegner-cli classgroup -D -23
    heegner-cli ldata -D -4 --prec 128
    heegner-cli etacheck --dmin -200 --dmax -3
    heegner-cli heegner -N 37 -D -7
    heegner-cli sign --curve 37a1 -D -7
    heegner-cli point --curve 37a1 -D -67 --prec 256
    heegner-cli sweep signs --curve 37a1 --dmin -500 --dmax -3 --out signs.csv

Exit codes: 0 success, 1 usage or input error, 2 internal consistency failure.
"""
import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import mpmath

from . import __version__
from ._arith import ConsistencyError, DomainError, PreconditionError
from . import dirichlet_l, elliptic_curve as ec, eta_kronecker, heegner_points as hp
from . import modular_param as mp_, root_number as rn
from .quadclass import class_group_structure, fundamental_discriminants

CURVES_ENV = "HEEGNER_CURVES"
MIN_PREC = {"ldata": 64, "etacheck": 64, "point": 128, "eta": 64, "minoration": 64, "points": 128}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# curve table


def _default_table():
    env = os.environ.get(CURVES_ENV)
    if env:
        return Path(env)
    return resources.files("heegner").joinpath("data/curves.txt")


def ingest_curves(path=None) -> dict:
    """label -> CurveModel from a table `label a1 a2 a3 a4 a6 N [degphi|-]`."""
    path = path or _default_table()
    table = {}
    text = path.read_text() if hasattr(path, "read_text") else Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (7, 8):
            raise UsageError(f"{path}:{lineno}: expected 7 or 8 fields, got {len(parts)}")
        label = parts[0]
        try:
            ainvs = [int(v) for v in parts[1:6]]
            N = int(parts[6])
            deg = None if len(parts) == 7 or parts[7] == "-" else int(parts[7])
        except ValueError:
            raise UsageError(f"{path}:{lineno}: non-integer field")
        if label in table:
            raise UsageError(f"{path}:{lineno}: duplicate label {label}")
        if N <= 0 or (deg is not None and deg <= 0):
            raise UsageError(f"{path}:{lineno}: conductor and degree must be positive")
        try:
            E = ec.make_curve(label, ainvs, N, deg)
        except DomainError as exc:
            raise UsageError(f"{path}:{lineno}: {label}: {exc}")
        if not ec.validate_conductor(E):
            raise UsageError(f"{path}:{lineno}: {label}: conductor inconsistent with reduction types")
        table[label] = E
    return table


def _curve(args):
    table = ingest_curves(getattr(args, "curves", None))
    if args.curve not in table:
        raise UsageError(f"unknown curve {args.curve}; known: {', '.join(sorted(table))}")
    return table[args.curve]


# ---------------------------------------------------------------------------
# formatting


def fmt(v, err=None, digits=None) -> str:
    """Fixed-significance decimal string; digits follow the error bound when given."""
    if v is None:
        return ""
    if isinstance(v, (int, str)):
        return str(v)
    if digits is None:
        if err is not None and err > 0:
            digits = int(max(3, min(40, -float(mpmath.log10(err)) + 1)))
        else:
            digits = 15
    return mpmath.nstr(mpmath.mpf(v) if not isinstance(v, mpmath.mpc) else v, digits,
                       min_fixed=-4, max_fixed=8)


def _pt(P):
    if P is None:
        return None
    return [str(c) for c in P]


# ---------------------------------------------------------------------------
# single-query commands


def cmd_classgroup(args):
    G = class_group_structure(args.D)
    return {
        "D": args.D, "h": G.order, "invariants": list(G.invariant_factors),
        "generators": [str(g) for g in G.generators],
        "forms": [str(f) for f in G.reduced_forms],
    }


def cmd_ldata(args):
    r = dirichlet_l.l_report(args.D, args.prec)
    return {
        "D": r.D, "prec": args.prec,
        "L1": fmt(r.L1, r.L1_err), "L1_err": fmt(r.L1_err, digits=3),
        "Lprime1": fmt(r.Lprime1, r.Lprime1_err), "Lprime1_err": fmt(r.Lprime1_err, digits=3),
        "script_LD": fmt(r.script_LD, r.script_LD_err), "script_LD_err": fmt(r.script_LD_err, digits=3),
    }


def _eta_row(D, prec):
    k = eta_kronecker.kronecker_limit_check(D, prec)
    if not k.ok:
        raise ConsistencyError(f"Kronecker identity fails at D={D}: {k.residual} > {k.bound}")
    return {"D": D, "lhs": fmt(k.lhs, k.bound), "rhs": fmt(k.rhs, k.bound),
            "residual": fmt(k.residual, digits=3), "bound": fmt(k.bound, digits=3), "ok": int(k.ok)}


def cmd_etacheck(args):
    Ds = [args.D] if args.D is not None else fundamental_discriminants(*_range(args))
    return [_eta_row(D, args.prec) for D in Ds]


def cmd_heegner(args):
    s = hp.average_height_report(args.D, args.N)
    return {"N": args.N, "D": args.D, "h": len(s.heights),
            "forms": [str(P.form) for P in hp.enumerate_heegner(args.N, args.D)],
            "ht_N": [fmt(h, digits=12) for h in s.heights],
            "mean": fmt(s.mean_height, digits=12), "predicted": fmt(s.predicted, digits=12),
            "residual": fmt(s.residual, digits=12), "discrepancy": fmt(s.discrepancy, digits=6)}


def cmd_sign(args):
    return rn.sign_report(_curve(args), args.D)


def _point_record(E, D, prec, denom_bound):
    r = mp_.heegner_point(E, D, prec, denom_bound)
    return {
        "curve": E.label, "D": D, "h": r.h,
        "orbit_ht_N": [fmt(h, digits=12) for h in r.heights],
        "proxy": fmt(r.proxy, digits=12), "lower": fmt(r.lower, digits=12),
        "predicted": fmt(r.predicted, digits=12) if r.predicted is not None else None,
        "trace_complex": fmt(r.trace_w, digits=20),
        "recognized": _pt(r.trace_point), "over": r.over,
        "hhat": fmt(r.hhat, digits=15) if r.hhat is not None else None,
        "notes": r.notes,
    }


def cmd_point(args):
    denom = args.denom_bound
    if denom is not None and args.prec < 2 * denom.bit_length() + 64:
        raise UsageError("--prec must be at least 2 log2(denom-bound) + 64")
    return _point_record(_curve(args), args.D, args.prec, denom)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepConfig:
    task: str
    curve: str = None
    N: int = 1
    dmin: int = -100
    dmax: int = -3
    prec: int = 128
    out: str = None
    jobs: int = 1
    curves: str = None

    def __post_init__(self):
        if not (self.dmin <= self.dmax < 0):
            raise UsageError("need dmin <= dmax < 0")
        if self.prec < 64:
            raise UsageError("precision must be at least 64 bits")


COLUMNS = {
    "signs": ["D", "sign", "heegner_condition", "N1", "N2", "datum_valid"],
    "heights": ["D", "h", "mean_ht", "predicted", "residual"],
    "eta": ["D", "lhs", "rhs", "residual", "bound", "ok"],
    "equidist": ["D", "h", "discrepancy"],
    "minoration": ["D", "h", "proxy", "lower", "predicted"],
    "points": ["D", "h", "over", "x", "y", "hhat", "proxy", "lower", "status"],
}


def _task_row(args):
    cfg, D = args
    try:
        return _compute_row(cfg, D)
    except (DomainError, PreconditionError) as exc:
        return {"D": D, "status": f"skipped: {exc}"}
    except ConsistencyError as exc:
        return {"D": D, "status": f"FAILED: {exc}", "_failed": True}


@lru_cache(maxsize=8)
def _cached_table(path):
    return ingest_curves(path)


def _compute_row(cfg, D):
    E = _cached_table(cfg.curves)[cfg.curve] if cfg.curve else None
    if cfg.task == "signs":
        s = rn.sign_report(E, D)
        d = s["datum"]
        return {"D": D, "sign": s["sign"], "heegner_condition": int(s["heegner_condition"]),
                "N1": "" if d == rn.UNAVAILABLE else d["N1"],
                "N2": "" if d == rn.UNAVAILABLE else d["N2"],
                "datum_valid": "" if d == rn.UNAVAILABLE else int(d["valid"])}
    if cfg.task == "heights":
        N = E.conductor if E else cfg.N
        if not hp.heegner_condition(N, D):
            return None
        s = hp.average_height_report(D, N)
        return {"D": D, "h": len(s.heights), "mean_ht": fmt(s.mean_height, digits=12),
                "predicted": fmt(s.predicted, digits=12), "residual": fmt(s.residual, digits=12)}
    if cfg.task == "eta":
        return _eta_row(D, cfg.prec)
    if cfg.task == "equidist":
        xs, _ = hp.reduced_roots_fast(D)
        return {"D": D, "h": len(xs), "discrepancy": fmt(hp.equidistribution_stats(D), digits=8)}
    if cfg.task == "minoration":
        if not hp.heegner_condition(E.conductor, D):
            return None
        orbit = mp_.heegner_orbit(E, D, cfg.prec)
        pred = mp_.predicted_asymptotic(E, D, cfg.prec) if E.deg_phi else None
        return {"D": D, "h": len(orbit[0]),
                "proxy": fmt(mp_.archimedean_height_proxy(E, D, cfg.prec, orbit=orbit), digits=12),
                "lower": fmt(mp_.minoration_lower(E, D, cfg.prec), digits=12),
                "predicted": fmt(pred, digits=12)}
    if cfg.task == "points":
        if not hp.heegner_condition(E.conductor, D):
            return None
        r = _point_record(E, D, cfg.prec, None)
        P = r["recognized"] or ["", ""]
        return {"D": D, "h": r["h"], "over": r["over"] or "", "x": P[0], "y": P[1],
                "hhat": r["hhat"] or "", "proxy": r["proxy"], "lower": r["lower"],
                "status": "; ".join(r["notes"]) or "ok"}
    raise UsageError(f"unknown task {cfg.task}")


def _done_keys(path):
    if not path or not Path(path).exists():
        return set()
    with open(path, newline="") as fh:
        return {int(row["D"]) for row in csv.DictReader(fh) if row.get("D")}


def run_sweep(cfg: SweepConfig) -> list:
    """Run a sweep, appending rows to cfg.out (if set) and skipping rows already present."""
    cols = COLUMNS[cfg.task] + ([] if "status" in COLUMNS[cfg.task] else ["status"])
    if cfg.task in ("signs", "minoration", "points") and not cfg.curve:
        raise UsageError(f"sweep {cfg.task} needs --curve")
    done = _done_keys(cfg.out)
    Ds = [D for D in fundamental_discriminants(cfg.dmin, cfg.dmax) if D not in done]
    work = [(cfg, D) for D in Ds]
    if cfg.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            rows = list(pool.map(_task_row, work, chunksize=8))
    else:
        rows = [_task_row(w) for w in work]
    rows = [r for r in rows if r is not None]
    failed = any(r.pop("_failed", False) for r in rows)
    if cfg.out:
        new = not Path(cfg.out).exists()
        with open(cfg.out, "a", newline="") as fh:
            wr = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
            if new:
                wr.writeheader()
            for r in rows:
                wr.writerow({c: r.get(c, "") for c in cols})
        meta = {"config": cfg.__dict__, "version": __version__,
                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                "rows_added": len(rows)}
        Path(str(cfg.out) + ".meta.json").write_text(json.dumps(meta, indent=1))
    if failed:
        raise ConsistencyError("some sweep records failed; see status column")
    return rows


def cmd_sweep(args):
    cfg = SweepConfig(args.task, args.curve, args.N, args.dmin, args.dmax, args.prec,
                      args.out, args.jobs, getattr(args, "curves", None))
    rows = run_sweep(cfg)
    if not args.out:
        cols = COLUMNS[cfg.task]
        wr = csv.DictWriter(sys.stdout, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        wr.writeheader()
        for r in rows:
            wr.writerow({c: r.get(c, "") for c in cols})
        return None
    return {"out": args.out, "rows_added": len(rows)}


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _range(args):
    if args.dmin is None or args.dmax is None:
        raise UsageError("give -D or both --dmin and --dmax")
    if not args.dmin <= args.dmax < 0:
        raise UsageError("need dmin <= dmax < 0")
    return args.dmin, args.dmax


def build_parser():
    p = _Parser(prog="heegner-cli", description="Heegner points, class groups and L-values")
    p.add_argument("--curves", help=f"curve table (default: ${CURVES_ENV} or the bundled table)")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, fn, D=True, curve=False, prec=None, rng=False):
        s = sub.add_parser(name)
        if D:
            s.add_argument("-D", type=int, required=not rng)
        if rng:
            s.add_argument("--dmin", type=int)
            s.add_argument("--dmax", type=int)
        if curve:
            s.add_argument("--curve", required=True)
        if prec:
            s.add_argument("--prec", type=int, default=prec)
        s.set_defaults(fn=fn)
        return s

    add("classgroup", cmd_classgroup)
    add("ldata", cmd_ldata, prec=128)
    add("etacheck", cmd_etacheck, prec=128, rng=True)
    h = add("heegner", cmd_heegner)
    h.add_argument("-N", type=int, default=1)
    add("sign", cmd_sign, curve=True)
    pt = add("point", cmd_point, curve=True, prec=256)
    pt.add_argument("--denom-bound", type=int)
    sw = sub.add_parser("sweep")
    sw.add_argument("task", choices=sorted(COLUMNS))
    sw.add_argument("--curve")
    sw.add_argument("-N", type=int, default=1)
    sw.add_argument("--dmin", type=int, required=True)
    sw.add_argument("--dmax", type=int, required=True)
    sw.add_argument("--prec", type=int, default=128)
    sw.add_argument("--out")
    sw.add_argument("--jobs", type=int, default=1)
    sw.set_defaults(fn=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        need = MIN_PREC.get(args.cmd if args.cmd != "sweep" else args.task)
        if need and getattr(args, "prec", need) < need:
            raise UsageError(f"{args.cmd} needs --prec >= {need}")
        out = args.fn(args)
    except (UsageError, DomainError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return 2
    if out is not None:
        json.dump(out, sys.stdout, indent=1, default=str)
        sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
