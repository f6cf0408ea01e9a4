"""Batch driver: the verification suite and individual computations with
machine-readable output (JSON and CSV, 17 significant digits)."""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .checks import GAMMA_GRID, run_suite
from .errors import ConfigError, DbscaleError
from .fncore import AtomKernel, DbSpace, PaleyWiener, fn_eval, kernel
from .numerics import SamplingSeries, find_zeros
from .operator import ExtensionHandle, GammaDomainElement
from .perturbation import krein_diff_check, lambda_of_gamma, qfunc
from .scale import counterexample_run, dictionary_star, dictionary_gamma, scale_norms


@dataclass
class RunConfig:
    a: float = math.pi
    gamma: float = math.pi / 4
    window: Tuple[float, float] = (-5.0, 5.0)
    tol: Optional[float] = None
    grid_n: int = 41
    seed: int = 0
    out: Optional[str] = None
    fmt: str = "json"
    gamma_given: bool = False

    def validate(self):
        if not self.a > 0:
            raise ConfigError("--a must be positive")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("--tol must be positive")
        if self.grid_n < 3:
            raise ConfigError("--grid-n must be at least 3")
        if not self.window[0] < self.window[1]:
            raise ConfigError("--window needs LO < HI")
        if self.fmt not in ("json", "csv"):
            raise ConfigError("--format must be json or csv")


# ----------------------------------------------------------------------------
# Serialization (round-trip exact doubles)
# ----------------------------------------------------------------------------

def _fmt_float(x):
    if isinstance(x, float):
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return "%.17g" % x
    return "%.17g" % float(x)


def _to_json(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + '  "%s": %s' % (k, _to_json(v, indent + 1))
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(_to_json(v, indent) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return '{"re": %s, "im": %s}' % (_fmt_float(obj.real),
                                         _fmt_float(obj.imag))
    if obj is None:
        return "null"
    return '"%s"' % str(obj).replace('"', '\\"')


def _emit(config, text):
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _csv(rows, header):
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, str):
                cells.append(v)
            elif isinstance(v, (int, np.integer)):
                cells.append(str(int(v)))
            else:
                cells.append("%.17g" % float(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _config_dict(config):
    return {"a": config.a, "gamma": config.gamma,
            "window": list(config.window), "tol": config.tol,
            "grid_n": config.grid_n, "seed": config.seed}


# ----------------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------------

def cmd_verify(config):
    records = run_suite(a=config.a, gamma=config.gamma, seed=config.seed,
                        grid_n=config.grid_n, tol_cap=config.tol)
    recs = [{"check_id": r.check_id, "params": r.params,
             "max_abs_err": r.max_abs_err, "tol": r.tol,
             "pass": r.passed, "runtime_ms": r.runtime_ms}
            for r in records]
    failed = [r.check_id for r in records if not r.passed]
    report = {"config": _config_dict(config), "records": recs,
              "summary": {"total": len(records),
                          "passed": len(records) - len(failed),
                          "failed": len(failed),
                          "failing_ids": sorted(set(failed)),
                          "all_pass": not failed}}
    _emit(config, _to_json(report) + "\n")
    return 1 if failed else 0


def _space(config):
    return DbSpace(PaleyWiener(config.a), ip_engine=SamplingSeries())


def cmd_spectrum(config):
    space = _space(config)
    gammas = [config.gamma] if config.gamma_given else \
        [0.0, math.pi / 2] + list(GAMMA_GRID)
    rows = []
    for g in gammas:
        zeros = find_zeros(space, g, config.window[0], config.window[1])
        for i, z in enumerate(zeros):
            rows.append((g, i, z))
    if config.fmt == "csv":
        _emit(config, _csv(rows, ["gamma", "index", "zero"]))
    else:
        _emit(config, _to_json({"config": _config_dict(config),
                                "zeros": [list(r) for r in rows]}) + "\n")
    return 0


def cmd_kernel(config):
    space = _space(config)
    xs = np.linspace(config.window[0], config.window[1], config.grid_n)
    k0 = kernel(space, xs.astype(complex), 0.0)
    ki = kernel(space, xs.astype(complex), 1j)
    rows = [(x, v0.real, v0.imag, vi.real, vi.imag)
            for x, v0, vi in zip(xs, k0, ki)]
    header = ["x", "k_x_0_re", "k_x_0_im", "k_x_i_re", "k_x_i_im"]
    if config.fmt == "csv":
        _emit(config, _csv(rows, header))
    else:
        _emit(config, _to_json({"config": _config_dict(config),
                                "header": header,
                                "rows": [list(r) for r in rows]}) + "\n")
    return 0


def cmd_qfunc(config):
    space = _space(config)
    xs = np.linspace(config.window[0], config.window[1], config.grid_n)
    rows = []
    for x in xs:
        w = complex(x, 1.0)
        qc = qfunc(space, w, "closed")
        qd = qfunc(space, w, "definitional")
        rows.append((x, 1.0, qc.real, qc.imag, qd.real, qd.imag, abs(qc - qd)))
    header = ["re_w", "im_w", "q_closed_re", "q_closed_im",
              "q_def_re", "q_def_im", "abs_diff"]
    if config.fmt == "csv":
        _emit(config, _csv(rows, header))
    else:
        _emit(config, _to_json({"config": _config_dict(config),
                                "header": header,
                                "rows": [list(r) for r in rows]}) + "\n")
    return 0


def cmd_krein(config):
    if abs(config.gamma % math.pi - math.pi / 2) < 1e-9 or \
            config.gamma % math.pi == 0.0:
        raise ConfigError("krein needs gamma in (0, pi) away from pi/2")
    space = _space(config)
    records = []
    for w in (1j, 0.3 + 0.7j):
        err, lam_err = krein_diff_check(space, config.gamma, w, AtomKernel(0.0))
        records.append({"w": w, "max_abs_err": err,
                        "lambda_consistency_err": lam_err})
    report = {"config": _config_dict(config),
              "lambda": lambda_of_gamma(space, config.gamma),
              "records": records}
    _emit(config, _to_json(report) + "\n")
    return 0


def cmd_counterexample(config):
    space = _space(config)
    rep = counterexample_run(config.a, space)
    report = {"config": _config_dict(config),
              "a": rep.a, "w0": rep.w0,
              "zero_residual": rep.zero_residual,
              "norm_phi_prime": rep.norm_phi_prime,
              "norm_eta_prime": rep.norm_eta_prime,
              "rel_gap": rep.rel_gap,
              "norm_phi_prime_sq_quad": rep.norm_phi_prime_sq_quad,
              "norm_phi_prime_sq_closed": rep.norm_phi_prime_sq_closed,
              "fourier_constant": rep.fourier_constant}
    _emit(config, _to_json(report) + "\n")
    return 0


def cmd_norms(config):
    space = _space(config)
    ext = ExtensionHandle(space, config.gamma)
    star_dict = dictionary_star(space, ext.gamma)
    gam_dict = dictionary_gamma(ext)
    entries = []
    for w in (0.0, 0.5, 1j, 1 + 1j):
        g = GammaDomainElement(ext, AtomKernel(complex(w)), 1j)
        ns = scale_norms(ext, g, star_dict, gam_dict)
        entries.append({"element": "R(i)k(%s)" % w,
                        "plus2": ns.plus2, "plusF": ns.plusF,
                        "minusF_lower": ns.minusF_lower,
                        "minus2_lower": ns.minus2_lower})
    report = {"config": _config_dict(config),
              "dictionary_size": len(star_dict), "norms": entries}
    _emit(config, _to_json(report) + "\n")
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "kernel": cmd_kernel,
    "qfunc": cmd_qfunc,
    "krein": cmd_krein,
    "counterexample": cmd_counterexample,
    "norms": cmd_norms,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="dbscale",
        description="Desk-scale verification of reproducing-kernel, "
                    "extension and rank-one perturbation identities.")
    p.add_argument("subcommand", choices=sorted(COMMANDS))
    p.add_argument("--a", type=float, default=math.pi)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--window", type=float, nargs=2, default=(-5.0, 5.0),
                   metavar=("LO", "HI"))
    p.add_argument("--tol", type=float, default=None,
                   help="cap every check tolerance (verify)")
    p.add_argument("--grid-n", type=int, default=41)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", dest="fmt", choices=["json", "csv"],
                   default=None)
    return p


def run(argv=None):
    args = build_parser().parse_args(argv)
    default_fmt = "csv" if args.subcommand in ("spectrum", "kernel",
                                               "qfunc") else "json"
    config = RunConfig(
        a=args.a,
        gamma=args.gamma if args.gamma is not None else math.pi / 4,
        window=tuple(args.window),
        tol=args.tol,
        grid_n=args.grid_n,
        seed=args.seed,
        out=args.out,
        fmt=args.fmt if args.fmt is not None else default_fmt,
        gamma_given=args.gamma is not None)
    config.validate()
    return COMMANDS[args.subcommand](config)


def main(argv=None):
    try:
        return run(argv)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except DbscaleError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
