"""Command-line front end.  Every command prints one JSON document (or a short text form)."""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import List, Optional

from . import errors
from .aschreier import wp, wp_inv
from .cinf import CInf
from .context import Config, precision, use_config
from .ffield import FieldTower
from .points import parse_points, parse_poly, zeta_degree
from .polylog import (OUTSIDE, Weight, cmpl_series, difference_residual, evaluate_branch,
                      lattice_reduce, monodromy_basis, region_test, series_vector, vec_li_branch)
from .relations import (chang_mishiba_check, eulerian_check, orthogonality_check,
                        recognize_rational, zeta_brute)
from .special import build_omega, omega_depth, pi_tilde
from .tate import TateSeries
from .tmodule import build_cn, exp_n, lambda_reduce, vec_log_n

__all__ = ["main", "cli_main", "build_parser", "selftest_report"]

SCHEMA = 1


class CheckFailed(Exception):
    pass


def _fr(x) -> Optional[str]:
    return None if x is None else str(Fraction(x))


def _config(args) -> Config:
    if args.q is not None:
        cfg = Config.for_q(args.q, T=args.T, P=args.P, R=args.R, product_depth=args.depth, fmt=args.format)
    else:
        cfg = Config(p=args.p, mq=args.mq, T=args.T, P=args.P, R=args.R,
                     product_depth=args.depth, fmt=args.format)
    return cfg


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("configuration")
    g.add_argument("--q", type=int, default=None, help="field size (overrides --p/--mq)")
    g.add_argument("--p", type=int, default=2)
    g.add_argument("--mq", type=int, default=1)
    g.add_argument("--T", type=int, default=32, help="t-truncation degree")
    g.add_argument("--P", type=int, default=64, help="precision window (θ-exponent floor)")
    g.add_argument("--R", type=int, default=24, help="τ-depth for Exp/Log coefficients")
    g.add_argument("--depth", type=int, default=None, help="Ω product depth override")
    g.add_argument("--format", choices=("json", "text"), default="json")


def _weighted(p):
    p.add_argument("--weight", required=True, help="comma-separated indices, e.g. 1,2")
    p.add_argument("--z", required=True, help="comma-separated θ-polynomials, e.g. 'θ, θ^2+1'")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aspolylog", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    _common(sub.add_parser("omega", help="Ω(t) and its difference equation"))
    _common(sub.add_parser("pi", help="the Carlitz period"))

    pl = sub.add_parser("polylog", help="multiple polylogarithms").add_subparsers(dest="sub", required=True)
    for name in ("eval", "continue", "monodromy"):
        p = pl.add_parser(name)
        _common(p)
        _weighted(p)
        p.add_argument("--star", action="store_true")
    tm = sub.add_parser("tmodule", help="tensor powers of the Carlitz module").add_subparsers(dest="sub", required=True)
    p = tm.add_parser("log")
    _common(p)
    p.add_argument("--z", required=True, help="n comma-separated coordinates")
    p = tm.add_parser("check-inverse")
    _common(p)
    p.add_argument("--n", type=int, required=True)

    rel = sub.add_parser("relations").add_subparsers(dest="sub", required=True)
    for name in ("orthogonality", "chang-mishiba"):
        p = rel.add_parser(name)
        _common(p)
        _weighted(p)
    p = rel.add_parser("eulerian")
    _common(p)
    _weighted(p)
    p.add_argument("--star", action="store_true")
    p.add_argument("--shift", action="append", default=[],
                   help="branch shift: ';'-separated α_k, each a t-polynomial like '1+t'")
    p.add_argument("--degbound", type=int, default=8)

    ze = sub.add_parser("zeta").add_subparsers(dest="sub", required=True)
    p = ze.add_parser("brute")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--deg", type=int, default=None, help="default: largest feasible degree ≤ 12")

    p = sub.add_parser("selftest", help="fast invariant suite")
    _common(p)
    return ap


# ---------------------------------------------------------------------------
# commands


def _cmd_omega(cfg, args):
    tw = cfg.tower
    om = build_omega(tw, cfg.T, cfg.product_depth)
    res = (om - (TateSeries.from_coeffs(tw, [-CInf.theta(tw, tw.q), 1], cfg.T) * om.twist(1))).bound()
    with precision(rho=tw.q):
        root = build_omega(tw, cfg.T, cfg.product_depth).eval(CInf.theta(tw, tw.q), strict=False)
    ok = res < Fraction(-cfg.P, 2) and root.bound() < Fraction(-cfg.P, 2)
    return ok, {"omega": om.to_json(), "difference_residual": _fr(res),
                "value_at_theta_q": root.to_json(),
                "product_depth": cfg.product_depth or omega_depth(tw.q, cfg.T, cfg.P, 1)}


def _cmd_pi(cfg, args):
    tw = cfg.tower
    pi = pi_tilde(tw, cfg.T, cfg.product_depth)
    expected = Fraction(tw.q, tw.q - 1)
    return pi.norm() == expected, {"pi": pi.to_json(), "norm_exponent": _fr(pi.norm()),
                                   "expected_exponent": _fr(expected), "text": pi.to_text()}


def _norms(zs):
    return [None if z.is_zero() else z.norm() for z in zs]


def _cmd_polylog(cfg, args):
    tw = cfg.tower
    w = Weight.parse(args.weight)
    zs = parse_points(args.z, tw)
    if len(zs) != w.d:
        raise errors.UsageError(f"weight has depth {w.d} but {len(zs)} points were given")
    q = tw.q
    if args.sub == "eval":
        out = {"weight": w.to_json(), "star": args.star}
        if any(z.is_zero() for z in zs):
            out["region"] = "inside_D_prime"
            out["value"] = CInf.zero(tw).to_json()
            return True, out
        reg = region_test(w, _norms(zs), args.star, q)
        out["region"] = reg
        if reg == OUTSIDE:
            raise errors.OutOfRegion("the series diverges at these points; use 'polylog continue'")
        out["value"] = cmpl_series(w, zs, args.star).to_json()
        return True, out
    if args.sub == "continue":
        bv = vec_li_branch(w, zs, args.star, cfg.T)
        res = difference_residual(bv)
        vals = evaluate_branch(bv, strict=False)
        ok = res < Fraction(-cfg.P, 2)
        return ok, {"weight": w.to_json(), "star": args.star, "difference_residual": _fr(res),
                    "values": [v.to_json() for v in vals], "branch": bv.to_json()}
    w.check_entry()
    mb = monodromy_basis(w, zs[:-1], args.star, cfg.T, z_last=zs[-1], tower=tw)
    ev = evaluate_branch(mb)
    return True, {"weight": w.to_json(), "star": args.star, "basis": mb.to_json(),
                  "evaluated": [[x.to_json() for x in col] for col in ev]}


def _cmd_tmodule(cfg, args):
    tw = cfg.tower
    if args.sub == "log":
        z = parse_points(args.z, tw)
        n = len(z)
        val, lat = vec_log_n(z, cfg.T)
        tm = build_cn(n, cfg.R, val[0].tower)
        back = exp_n(val, tm)
        res = max((a - b.retower(a.tower) if a.tower != b.tower else a - b).bound() for a, b in zip(back, z))
        coeffs, red = lambda_reduce(val, lat)
        ok = res < Fraction(-cfg.P, 2)
        return ok, {"n": n, "log": [v.to_json() for v in val], "exp_residual": _fr(res),
                    "lattice": lat.to_json(), "reduced": [v.to_json() for v in red],
                    "lattice_coefficients": [c.tolist() for c in coeffs]}
    tm = build_cn(args.n, cfg.R, tw)
    comp = tm.compose_exp_log()
    worst = None
    for k, M in enumerate(comp):
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                y = x - CInf.one(tw) if (k == 0 and i == j) else x
                b = y.bound()
                worst = b if worst is None else max(worst, b)
    q = tw.q
    upto = max([i for i in range(1, cfg.R + 1) if q**i <= cfg.P] or [1])
    with precision(cap=cfg.P + q**upto + 32):
        fres = build_cn(args.n, upto, tw).functional_residual(upto)
    ok = worst < Fraction(-cfg.P, 2) and (fres is None or fres < Fraction(-cfg.P, 2))
    return ok, {"n": args.n, "R": cfg.R, "compose_residual": _fr(worst), "functional_residual": _fr(fres)}


def _parse_shift(text, p):
    return [parse_poly(s.replace("t", "θ"), p) for s in text.split(";")]


def _cmd_relations(cfg, args):
    tw = cfg.tower
    w = Weight.parse(args.weight)
    zs = parse_points(args.z, tw)
    if len(zs) != w.d:
        raise errors.UsageError(f"weight has depth {w.d} but {len(zs)} points were given")
    if args.sub == "orthogonality":
        rep = orthogonality_check(w, zs, cfg.T)
        return rep.verdict, rep.to_json()
    if args.sub == "chang-mishiba":
        rep = chang_mishiba_check(w, zs, cfg.T)
        return rep.verdict, rep.to_json()
    shifts = [_parse_shift(s, tw.p) for s in args.shift]
    rep = eulerian_check(w, zs, shifts, args.star, cfg.T, args.degbound)
    return rep.consistent, rep.to_json()


def _cmd_zeta(cfg, args):
    tw = cfg.tower
    deg = args.deg if args.deg is not None else zeta_degree(tw.q)
    if args.n < 1 or deg < 0:
        raise errors.UsageError("need n >= 1 and deg >= 0")
    z = zeta_brute(tw, args.n, deg)
    return True, {"n": args.n, "deg": deg, "value": z.to_json(), "text": z.to_text()}


# ---------------------------------------------------------------------------
# selftest


def _check(name, ok, **info):
    return {"name": name, "pass": bool(ok), **{k: _fr(v) if isinstance(v, Fraction) else v for k, v in info.items()}}


def _rand_cinf(tw, rng, lo, hi):
    c = CInf.zero(tw)
    for j in range(lo, hi + 1):
        c = c + CInf.const(tw, rng.randrange(tw.p)) * CInf.theta(tw, j)
    return c


def selftest_report(cfg: Config) -> List[dict]:
    """Deterministic battery of invariants at the current configuration."""
    tw = cfg.tower
    q = tw.q
    tol = Fraction(-cfg.P, 2)
    rng = random.Random(20240601 + q)
    th = CInf.theta(tw)
    out = []

    worst = None
    for _ in range(5):
        deg = rng.randint(0, 4)
        ys, us = [], []
        for _k in range(deg + 1):
            ys.append(_rand_cinf(tw, rng, 0, 2))
            us.append(_rand_cinf(tw, rng, -3, -1))
        y = TateSeries.from_coeffs(tw, ys, cfg.T)
        f = wp(y) + TateSeries.from_coeffs(tw, us, cfg.T)
        r = (wp(wp_inv(f)) - f).bound()
        worst = r if worst is None else max(worst, r)
    out.append(_check("artin_schreier_round_trip", worst < tol, residual=worst))

    om = build_omega(tw, cfg.T)
    res = (om - TateSeries.from_coeffs(tw, [-CInf.theta(tw, q), 1], cfg.T) * om.twist(1)).bound()
    pi = pi_tilde(tw, cfg.T)
    out.append(_check("omega_difference_equation", res < tol, residual=res))
    out.append(_check("pi_norm", pi.norm() == Fraction(q, q - 1), exponent=pi.norm()))

    w = Weight((1, 2))
    zs = [th, th + CInf.one(tw)] if q > 2 else [CInf.one(tw), th]
    bv = vec_li_branch(w, zs, False, cfg.T)
    ev = evaluate_branch(bv)
    sv = series_vector(w, zs, False)
    from .polylog import _W, _points, monodromy_basis as _mb
    M = evaluate_branch(_mb(w, zs[:-1], False, cfg.T, tower=tw))
    _, resid = lattice_reduce([a - b for a, b in zip(ev, sv)], M)
    r = max(x.bound() for x in resid)
    out.append(_check("branch_matches_series", r < tol, residual=r))
    dr = difference_residual(bv)
    out.append(_check("difference_system", dr < tol, residual=dr))

    rep = orthogonality_check(w, zs, cfg.T)
    out.append(_check("orthogonality", rep.verdict, residual=rep.worst_distance))
    cm = chang_mishiba_check(w, zs, cfg.T)
    out.append(_check("chang_mishiba", cm.verdict, residual=cm.residual))

    tm = build_cn(2, min(cfg.R, 12), tw)
    comp = tm.compose_exp_log()
    worst = max((x - CInf.one(tw) if (k == 0 and i == j) else x).bound()
                for k, Mx in enumerate(comp) for i, row in enumerate(Mx) for j, x in enumerate(row))
    out.append(_check("exp_log_inverse", worst < tol, residual=worst))

    rr = recognize_rational(CInf.one(tw) / (th - CInf.one(tw)))
    ok = rr is not None and len(rr.numerator) == 1 and len(rr.denominator) == 2
    out.append(_check("rational_reconstruction", ok))
    z1 = zeta_brute(tw, 1, min(zeta_degree(q), 6))
    l1 = cmpl_series((1,), [CInf.one(tw)])
    r = (z1 - l1).bound()
    out.append(_check("zeta_one", r < tol, residual=r))
    return out


def _cmd_selftest(cfg, args):
    checks = selftest_report(cfg)
    return all(c["pass"] for c in checks), {"checks": checks}


_DISPATCH = {"omega": _cmd_omega, "pi": _cmd_pi, "polylog": _cmd_polylog, "tmodule": _cmd_tmodule,
             "relations": _cmd_relations, "zeta": _cmd_zeta, "selftest": _cmd_selftest}


def _emit(doc, fmt, stream):
    if fmt == "json":
        stream.write(json.dumps(doc, sort_keys=True, separators=(",", ":"), default=_default) + "\n")
        return
    for k in sorted(doc):
        v = doc[k]
        if isinstance(v, (dict, list)) and k not in ("checks",):
            v = json.dumps(v, sort_keys=True, default=_default)
            if len(v) > 200:
                v = v[:197] + "..."
        stream.write(f"{k}: {v}\n")


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "to_json"):
        return o.to_json()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def cli_main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
    except ValueError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    name = args.cmd + (f" {args.sub}" if getattr(args, "sub", None) else "")
    try:
        with use_config(cfg):
            ok, body = _DISPATCH[args.cmd](cfg, args)
    except errors.UsageError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except ValueError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except errors.ArithmeticDomainError as exc:
        doc = {"schema": SCHEMA, "command": name, "config": cfg.to_json(), "ok": False,
               "error": type(exc).__name__, "message": str(exc)}
        _emit(doc, cfg.fmt, stdout)
        return 1
    doc = {"schema": SCHEMA, "command": name, "config": cfg.to_json(), "ok": bool(ok), **body}
    _emit(doc, cfg.fmt, stdout)
    return 0 if ok else 1


def main() -> None:
    sys.exit(cli_main())
