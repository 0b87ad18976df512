"""Command-line front end: parameter sweeps, report files, acceptance runner.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage/config error.
All numeric inputs are decimal strings parsed at the working precision (no
binary-float detour); ULTRANA_PRECISION overrides the default precision.
Identical configurations produce byte-identical CSV files; run metadata
(with the only timestamp) lives in the JSON reports.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from mpmath import mp, mpf, workprec

from . import acceptance as acc
from . import holder as holder_mod
from . import kernels as kernel_mod
from . import majorant as maj
from . import multiindex as mi
from . import propagator as prop
from . import sharp_example as sharp
from .errors import DomainError, UltranaError
from .numerics import DEFAULT_PRECISION
from .reports import fmt, report_rows_csv, write_csv, write_json

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    """Merged run configuration: defaults < ULTRANA_PRECISION < config file < flags."""

    command: str = ""
    precision_bits: int = DEFAULT_PRECISION
    nmax: int = 1000
    c0_list: list[str] = field(default_factory=lambda: ["1"])
    kappa_list: list[str] = field(default_factory=lambda: ["2"])
    grid_size: int = 4096
    output_path: str | None = None
    format: str = "csv"
    extra: dict[str, Any] = field(default_factory=dict)


def _parse_decimal(s: str, precision: int) -> mpf:
    with workprec(precision):
        try:
            return +mpf(s)
        except Exception as exc:
            raise DomainError(f"not a decimal number: {s!r}") from exc


def _split_list(value) -> list[str]:
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [tok for tok in str(value).replace(",", " ").split() if tok]


def _emit(cfg: RunConfig, header, rows, payload, default_stem: str) -> None:
    """Write CSV rows and/or a JSON report according to the config."""
    out = cfg.output_path
    if cfg.format == "csv":
        if out:
            write_csv(out, header, rows)
            print(f"wrote {out}")
        else:
            print(",".join(header))
            for row in rows:
                print(",".join(fmt(x) for x in row))
    else:
        if out:
            write_json(out, payload)
            print(f"wrote {out}")
        else:
            print(json.dumps(payload, indent=2, sort_keys=True, default=str))


# ---------------------------------------------------------------------------
# Subcommand handlers (return process exit code)
# ---------------------------------------------------------------------------

def _cmd_majorant(cfg: RunConfig) -> int:
    p = cfg.precision_bits
    check = cfg.extra.get("check", "all")
    reports = []
    if check in ("monotonicity", "all"):
        n = int(cfg.extra.get("n") or min(cfg.nmax, 10 ** 4))
        reports.append(maj.check_monotonicity(n, precision=p, collect_rows=bool(cfg.output_path)))
    if check in ("dn", "all"):
        reports.append(maj.check_dn(cfg.nmax, precision=p))
    if check in ("log-shift", "all"):
        sup = maj.check_log_shift(cfg.nmax, precision=p)
        val, limit = maj.log_shift_ratio(cfg.nmax, precision=p)
        print(f"log-shift sup over 2..{cfg.nmax}: {fmt(sup)}; value at nmax: {fmt(val)} "
              f"(limit form {fmt(limit)})")
    if check in ("aj-gaussian", "aj-supergaussian", "all"):
        grid = maj.geometric_grid(min(cfg.nmax, 10 ** 5))
        rows = []
        for n in grid:
            if check in ("aj-gaussian", "all"):
                try:
                    rows.append(("aj_gaussian", n, 0, maj.check_aj_gaussian(n, 0, precision=p), True))
                except IndexError:
                    pass
            if check in ("aj-supergaussian", "all"):
                L = cfg.extra.get("L", "3")
                try:
                    rows.append(("aj_supergaussian", n, L,
                                 maj.check_aj_supergaussian(n, L, precision=p), True))
                except IndexError:
                    pass
        for lemma, n, s, ratio, ok in rows[:8]:
            print(f"{lemma} n={n}: ratio {fmt(ratio)}")
        if cfg.output_path and cfg.format == "csv":
            write_csv(cfg.output_path, ["lemma_id", "n", "j_or_s", "ratio", "pass"], rows)
            print(f"wrote {cfg.output_path}")

    failed = any(not r.passed for r in reports)
    for r in reports:
        print(f"{r.lemma_id}: {'PASS' if r.passed else 'FAIL'} "
              f"(worst {fmt(r.worst_ratio)}, {len(r.violations)} violations)")
    if cfg.output_path and reports:
        if cfg.format == "csv":
            report_rows_csv(reports, cfg.output_path)
        else:
            write_json(cfg.output_path, {"reports": [r.summary() for r in reports],
                                         "precision": p})
        print(f"wrote {cfg.output_path}")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _cmd_bootstrap_ratio(cfg: RunConfig) -> int:
    p = cfg.precision_bits
    K = cfg.extra.get("K", "0")
    rows = []
    k1_report = {}
    for klabel in cfg.kappa_list:
        kv = _parse_decimal(klabel, p)
        if kv <= 1:
            raise DomainError("bootstrap-ratio requires kappa > 1")
        for c0 in cfg.c0_list:
            params = maj.MajorantParams.create(c0, kv, K, precision=p)
            sweep, k1 = maj.bootstrap_sweep(params, cfg.nmax, precision=p)
            k1_report[f"K1[kappa={klabel},C0={c0}]"] = fmt(k1)
            for n, r in sweep:
                rows.append((klabel, c0, n, r))
    rows.sort(key=lambda t: (t[0], t[1], t[2]))
    payload = {"command": "bootstrap-ratio", "precision": p, "nmax": cfg.nmax,
               "K1": k1_report}
    _emit(cfg, ["kappa", "C0", "n", "ratio"], rows, payload, "bootstrap_ratio")
    for k, v in k1_report.items():
        print(f"{k} = {v}")
    return EXIT_OK


def _make_sequence(cfg: RunConfig, p: int):
    c0 = cfg.c0_list[0]
    N = int(cfg.extra.get("N") or 200)
    if cfg.extra.get("equation", "second") == "first":
        return prop.propagate_first_order(c0, N, precision=p)
    base = prop.base_case(cfg.extra.get("cp", "2"), precision=p)
    return prop.propagate_second_order(c0, base, N, precision=p)


def _cmd_propagate(cfg: RunConfig) -> int:
    p = cfg.precision_bits
    kappa = _parse_decimal(cfg.kappa_list[0], p)
    if kappa <= 1:
        raise DomainError("propagate requires kappa > 1 for the envelope columns")
    seq = _make_sequence(cfg, p)
    rows = prop.sequence_rows(seq, kappa, precision=p)
    payload = {
        "command": "propagate",
        "equation_kind": seq.equation_kind,
        "C0": fmt(seq.C0),
        "precision": p,
        "base_case": None if seq.base is None else {
            "c_p": fmt(seq.base.c_p), "b0": fmt(seq.base.b0),
            "b1": fmt(seq.base.b1), "b2": fmt(seq.base.b2)},
        "fitted_K": fmt(prop.fit_K(seq, kappa, precision=p)),
    }
    _emit(cfg, ["n", "log_b_n", "implied_C_n", "envelope_margin"], rows,
          payload, "propagate")
    return EXIT_OK


def _cmd_fit_k(cfg: RunConfig) -> int:
    p = cfg.precision_bits
    kappa = _parse_decimal(cfg.kappa_list[0], p)
    if kappa <= 1:
        raise DomainError("fit-k requires kappa > 1")
    seq = _make_sequence(cfg, p)
    K = prop.fit_K(seq, kappa, precision=p)
    payload = {"command": "fit-k", "equation_kind": seq.equation_kind,
               "C0": fmt(seq.C0), "kappa": fmt(kappa), "N": len(seq) - 1,
               "fitted_K": fmt(K), "precision": p}
    print(f"fitted K = {fmt(K)}")
    if cfg.output_path:
        write_json(cfg.output_path, payload)
        print(f"wrote {cfg.output_path}")
    return EXIT_OK


def _cmd_sharp(cfg: RunConfig) -> int:
    p = cfg.precision_bits
    ex = sharp.SharpExample.create(cfg.c0_list[0], precision=p)
    falsify = cfg.extra.get("falsify")
    if falsify == "lambda":
        lam = cfg.extra.get("lambda", "2")
        C = cfg.extra.get("C", "5")
        res = sharp.falsify_lambda(ex, C, lam, cfg.nmax, precision=p)
    elif falsify == "kappa":
        kap = cfg.extra.get("kappa_falsify") or cfg.kappa_list[0]
        kv = _parse_decimal(kap, p)
        if not (0 < kv < 1):
            raise DomainError("falsify-kappa requires kappa in (0, 1)")
        C = cfg.extra.get("C", "1")
        res = sharp.falsify_kappa(ex, kv, C, cfg.nmax, precision=p)
    else:
        return _sharp_brackets(cfg, ex, p)
    payload = {
        "command": "sharp-falsify",
        "target": res.target,
        "parameters": {k: fmt(v) for k, v in res.parameters.items()},
        "violating_n": res.violating_n,
        "lhs_over_rhs_at_n": fmt(res.lhs_over_rhs_at_n),
        "nmax": res.nmax,
        "notes": res.notes,
        "precision": p,
    }
    if cfg.output_path:
        write_json(cfg.output_path, payload)
        print(f"wrote {cfg.output_path}")
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def _sharp_brackets(cfg: RunConfig, ex, p: int) -> int:
    nmax = min(cfg.nmax, 2000)
    kappa = _parse_decimal(cfg.kappa_list[0], p)
    grid = cfg.grid_size
    brs = sharp.sup_norm_brackets(ex, nmax, grid_size=grid, precision=p)
    K = prop.fit_K([b.upper for b in brs], kappa, C0=ex.C0, precision=p)
    rows = []
    with workprec(p + 16):
        lnC = mp.log(kappa * ex.C0 + K * (1 / mp.log(kappa) + 1))
        from .numerics import _tables
        t = _tables(p, nmax)
        for b in brs:
            n = b.n
            env_log = n * lnC + t.lnfact[n] - n * t.lnln[n]
            cauchy_log = (sharp.cauchy_bound(ex, n, precision=p).log_abs
                          if n >= 3 else None)
            rows.append((n, b.lower.log_abs, b.upper.log_abs, cauchy_log,
                         env_log, env_log - b.upper.log_abs))
    payload = {"command": "sharp-brackets", "C0": fmt(ex.C0), "fitted_K": fmt(K),
               "kappa": fmt(kappa), "grid_size": grid, "precision": p}
    _emit(cfg, ["n", "log_sup_lower", "log_sup_upper", "log_cauchy_bound",
                "log_theorem_envelope", "margin"], rows, payload, "sharp")
    return EXIT_OK


def _cmd_multiindex(cfg: RunConfig) -> int:
    p = cfg.precision_bits
    dmax = int(cfg.extra.get("dmax", 4))
    order_max = int(cfg.extra.get("order_max", 8))
    failures = []
    checked = 0
    for d in range(1, dmax + 1):
        for total in range(order_max + 1):
            for alpha in mi.enumerate_multiindices(d, total):
                for l in range(total + 1):
                    res = mi.vandermonde_check(alpha, l)
                    checked += 1
                    if not res.ok:
                        failures.append(("vandermonde", list(alpha.components), l,
                                         res.lhs, res.rhs))
    import random as _random
    from fractions import Fraction
    rng = _random.Random(int(cfg.extra.get("seed", 20240901)))
    cases = int(cfg.extra.get("cases", 100))
    red_ok = 0
    for _ in range(cases):
        d = rng.randint(1, min(3, dmax))
        order = rng.randint(0, 12)
        cuts = sorted(rng.randint(0, order) for _ in range(d - 1))
        comps = [b - a for a, b in zip([0] + cuts, cuts + [order])]
        alpha = mi.MultiIndex(tuple(comps))
        res = mi.highdim_reduction_check(alpha, Fraction(rng.randint(1, 9), rng.randint(1, 9)),
                                         Fraction(rng.randint(1, 9), rng.randint(1, 9)),
                                         precision=p)
        if res.ok:
            red_ok += 1
        else:
            failures.append(("reduction", list(alpha.components), None,
                             fmt(res.lhs), fmt(res.rhs)))
    payload = {"command": "multiindex", "vandermonde_checked": checked,
               "reduction_cases": cases, "reduction_passed": red_ok,
               "failures": len(failures), "precision": p}
    if cfg.output_path:
        if cfg.format == "csv":
            write_csv(cfg.output_path, ["check", "alpha", "l", "lhs", "rhs"], failures)
        else:
            write_json(cfg.output_path, payload)
        print(f"wrote {cfg.output_path}")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_CHECK_FAILED if failures else EXIT_OK


def _cmd_kernel(cfg: RunConfig) -> int:
    p = cfg.precision_bits
    s = cfg.extra.get("s", "2")
    d = int(cfg.extra.get("d", 1))
    spec = kernel_mod.QuadratureSpec(precision=min(p, 192))
    params = kernel_mod.KernelParams.create(s, d, spec)
    check = cfg.extra.get("check", "all")
    rows = []
    payload: dict[str, Any] = {"command": "kernel", "s": fmt(params.s), "d": d,
                               "precision": spec.precision}
    failed = False
    if check in ("bounds", "all"):
        rep = kernel_mod.check_kernel_bounds(params)
        payload["bounds_worst_ratio"] = fmt(rep.worst_ratio)
        failed |= not rep.passed
        for tag, r, ratio, ok in rep.rows:
            rows.append((fmt(params.s), d, r, kernel_mod.bessel_kernel(params, r), ratio))
    if check in ("grad", "all"):
        rep = kernel_mod.check_grad_bound(params)
        payload["grad_worst_ratio"] = fmt(rep.worst_ratio)
        failed |= not rep.passed
    if check in ("mass", "all"):
        m = kernel_mod.kernel_mass(params)
        payload["mass"] = fmt(m)
        failed |= not abs(m - 1) <= mpf("1e-6")
    if check in ("l1", "all"):
        payload["grad_l1"] = fmt(kernel_mod.grad_kernel_l1(d, spec))
    if cfg.output_path and rows and cfg.format == "csv":
        write_csv(cfg.output_path, ["s", "d", "r", "G_value", "bound_ratio"], rows)
        print(f"wrote {cfg.output_path}")
    elif cfg.output_path:
        write_json(cfg.output_path, payload)
        print(f"wrote {cfg.output_path}")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _cmd_holder(cfg: RunConfig) -> int:
    beta_max = int(cfg.extra.get("beta_max", 20))
    kmax = int(cfg.extra.get("kmax", 10))
    c0 = cfg.c0_list[0]
    rep1 = holder_mod.check_coeff_holder(float(mpf(c0)), beta_max,
                                         grid_size=cfg.grid_size)
    rep2 = holder_mod.check_mollifier_interpolation(float(mpf(c0)), kmax,
                                                    grid_size=cfg.grid_size)
    rows = [(r[0], r[1], r[2], r[3]) for r in rep1.rows] + \
           [(r[0], r[1], r[2], r[3]) for r in rep2.rows]
    payload = {"command": "holder", "C0": c0,
               "coeff_ratio_spread": rep1.params["spread"],
               "mollifier_c": fmt(rep2.worst_ratio),
               "grid_size": cfg.grid_size}
    _emit(cfg, ["k_or_beta", "estimate", "bound", "ratio"], rows, payload, "holder")
    failed = not (rep1.passed and rep2.passed)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _cmd_acceptance(cfg: RunConfig) -> int:
    only = cfg.extra.get("only") or None
    results = acc.run_acceptance(only=only, precision=cfg.precision_bits)
    payload = {
        "command": "acceptance",
        "precision": cfg.precision_bits,
        "criteria": [
            {"criterion": r.criterion, "name": r.name, "module": r.module,
             "passed": r.passed, "runtime_s": round(r.runtime_s, 2),
             "details": r.details}
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    if cfg.output_path:
        write_json(cfg.output_path, payload)
        print(f"wrote {cfg.output_path}")
    return EXIT_OK if payload["all_passed"] else EXIT_CHECK_FAILED


_HANDLERS = {
    "majorant": _cmd_majorant,
    "bootstrap-ratio": _cmd_bootstrap_ratio,
    "propagate": _cmd_propagate,
    "fit-k": _cmd_fit_k,
    "sharp": _cmd_sharp,
    "multiindex": _cmd_multiindex,
    "kernel": _cmd_kernel,
    "holder": _cmd_holder,
    "acceptance": _cmd_acceptance,
}


# ---------------------------------------------------------------------------
# Argument parsing and config merge
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ultrana",
        description="log-type ultra-analytic bound verification engine",
    )
    ap.add_argument("--config", help="JSON config file (flags override it)")
    sub = ap.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--precision", type=int, default=None,
                        help="working precision in bits (>= 64)")
        sp.add_argument("--output", default=None, help="report file path")
        sp.add_argument("--format", choices=["csv", "json"], default=None)
        sp.add_argument("--nmax", type=int, default=None)
        sp.add_argument("--c0", default=None, help="C0 value(s), comma separated decimals")
        sp.add_argument("--kappa", default=None, help="kappa value(s), comma separated")
        sp.add_argument("--grid", type=int, default=None, help="grid size")

    sp = sub.add_parser("majorant", help="certify the a_j lemmas")
    common(sp)
    sp.add_argument("--check", default="all",
                    choices=["monotonicity", "dn", "log-shift", "aj-gaussian",
                             "aj-supergaussian", "all"])
    sp.add_argument("--n", type=int, default=None, help="single n for monotonicity")
    sp.add_argument("--L", default="3", help="super-Gaussian slope L > 1")

    sp = sub.add_parser("bootstrap-ratio", help="R(n) sweep and measured K1")
    common(sp)
    sp.add_argument("--K", default="0", help="envelope constant K >= 0")

    for name in ("propagate", "fit-k"):
        sp = sub.add_parser(name, help="bound propagation / envelope fit")
        common(sp)
        sp.add_argument("--equation", choices=["second", "first"], default="second")
        sp.add_argument("--cp", default="2", help="interpolation constant c_p >= 1")
        sp.add_argument("--N", type=int, default=200)

    sp = sub.add_parser("sharp", help="explicit-solution computations")
    common(sp)
    sp.add_argument("--falsify", choices=["lambda", "kappa"], default=None)
    sp.add_argument("--lambda", dest="lambda_", default="2")
    sp.add_argument("--C", default=None)

    sp = sub.add_parser("multiindex", help="exact combinatorial identities")
    common(sp)
    sp.add_argument("--dmax", type=int, default=4)
    sp.add_argument("--order-max", type=int, default=8)
    sp.add_argument("--cases", type=int, default=100)
    sp.add_argument("--seed", type=int, default=20240901)

    sp = sub.add_parser("kernel", help="Bessel potential kernel checks")
    common(sp)
    sp.add_argument("--s", default="2")
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--check", default="all",
                    choices=["bounds", "grad", "mass", "l1", "all"])

    sp = sub.add_parser("holder", help="Hölder seminorm checks")
    common(sp)
    sp.add_argument("--beta-max", type=int, default=20)
    sp.add_argument("--kmax", type=int, default=10)

    sp = sub.add_parser("acceptance", help="run the acceptance suite")
    common(sp)
    sp.add_argument("--only", action="append", default=None,
                    help="restrict to a module (repeatable)")
    return ap


def _merge_config(args: argparse.Namespace) -> RunConfig:
    file_cfg: dict[str, Any] = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except Exception as exc:
            raise DomainError(f"cannot read config file {args.config}: {exc}")
        if not isinstance(file_cfg, dict):
            raise DomainError("config file must contain a JSON object")

    def pick(flag_value, file_key, default):
        if flag_value is not None:
            return flag_value
        if file_key in file_cfg:
            return file_cfg[file_key]
        return default

    env_prec = os.environ.get("ULTRANA_PRECISION")
    default_prec = int(env_prec) if env_prec else DEFAULT_PRECISION
    precision = int(pick(args.precision, "precision_bits", default_prec))
    if precision < 64:
        raise DomainError("precision must be >= 64 bits")

    cfg = RunConfig(
        command=args.command or "",
        precision_bits=precision,
        nmax=int(pick(getattr(args, "nmax", None), "nmax", 1000)),
        c0_list=_split_list(pick(getattr(args, "c0", None), "c0_list", "1")),
        kappa_list=_split_list(pick(getattr(args, "kappa", None), "kappa_list", "2")),
        grid_size=int(pick(getattr(args, "grid", None), "grid_size", 4096)),
        output_path=pick(args.output, "output_path", None),
        format=pick(args.format, "format", "csv"),
    )
    if cfg.format not in ("csv", "json"):
        raise DomainError("format must be csv or json")
    if not cfg.c0_list:
        raise DomainError("at least one C0 value is required")
    if not cfg.kappa_list:
        cfg.kappa_list = ["2"]

    for key in ("check", "n", "L", "K", "equation", "cp", "N", "falsify",
                "C", "dmax", "order_max", "cases", "seed", "s", "d",
                "beta_max", "kmax", "only"):
        attr = key if key != "order_max" else "order_max"
        val = getattr(args, attr, None)
        if val is None and key in file_cfg:
            val = file_cfg[key]
        if val is not None:
            cfg.extra[key] = val
    if getattr(args, "lambda_", None) is not None:
        cfg.extra["lambda"] = args.lambda_
    if args.command == "sharp" and "kappa" in cfg.extra:
        cfg.extra["kappa_falsify"] = cfg.extra["kappa"]
    if args.command == "sharp" and getattr(args, "kappa", None) is not None:
        cfg.extra["kappa_falsify"] = args.kappa

    # basic precondition validation (exit 2 on violation)
    for klabel in cfg.kappa_list:
        kv = _parse_decimal(klabel, cfg.precision_bits)
        if cfg.command in ("bootstrap-ratio", "propagate", "fit-k") and kv <= 1:
            raise DomainError(f"{cfg.command} requires kappa > 1, got {klabel}")
    for c0 in cfg.c0_list:
        if _parse_decimal(c0, cfg.precision_bits) <= 0:
            raise DomainError(f"C0 must be > 0, got {c0}")
    return cfg


def main(argv: list[str] | None = None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    if not args.command:
        ap.print_help()
        return EXIT_USAGE
    try:
        cfg = _merge_config(args)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _HANDLERS[cfg.command](cfg)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UltranaError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
