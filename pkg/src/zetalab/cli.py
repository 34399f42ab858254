"""Command-line interface: wires JSON/flag configs to the library and
writes CSV/JSON artifacts.

Subcommands: variance, chf, dist, torus, bs, scan, zeros.  Common
flags: --config PATH (a JSON object of parameters), --out DIR,
--workers N, --seed S, --tol X.  Resolution order for every parameter:
command-line flag, then config file, then environment variable
ZETALAB_<NAME>, then the built-in default.

Every command validates its full configuration before computing and
buffers all output content in memory, so an invalid config or a failed
run never leaves partial files.  The exit code is 0 only when the hard
invariants of the run hold; deviations that the library only reports
(soft targets) never affect the exit code.  All floats are written via
repr and JSON keys are sorted, so reruns with the same config and seed
are byte-identical apart from the generated_at line.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import bandlimit, lab, selberg, torus, variance, zeta
from .errors import ZetalabError


def _env_lookup(name: str):
    return os.environ.get("ZETALAB_" + name.upper())


class _Params:
    """Layered parameter resolution: flags over config over env over default."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self.args = args
        self.config = config
        self.resolved = {}

    def get(self, name: str, default=None, cast=None, required: bool = False):
        val = getattr(self.args, name, None)
        if val is None:
            val = self.config.get(name)
        if val is None:
            env = _env_lookup(name)
            if env is not None:
                val = env
        if val is None:
            val = default
        if val is None:
            if required:
                raise ZetalabError(f"missing required parameter {name!r}")
            self.resolved[name] = None
            return None
        if cast is not None:
            val = cast(val)
        self.resolved[name] = val
        return val


def _load_config(path):
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ZetalabError("config file must contain a JSON object")
    return cfg


def _json_default(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _write_outputs(out_dir: str, files: dict) -> None:
    """Write all buffered outputs at once (never partial)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, content in files.items():
        (out / name).write_text(content, encoding="utf-8")


def _json_payload(command: str, params: dict, body: dict) -> str:
    doc = {"command": command, "params": params, "generated_at":
           datetime.datetime.now(datetime.timezone.utc).isoformat()}
    doc.update(body)
    return json.dumps(doc, sort_keys=True, indent=2, default=_json_default) + "\n"


def _context_from(p: _Params, tol: float):
    sigma = p.get("sigma", cast=float)
    psi = p.get("psi", cast=float)
    T = p.get("T", cast=float, required=True)
    K_const = p.get("K_const", 1.0, cast=float)
    return variance.make_context(T=T, sigma=sigma, psi=psi, K_const=K_const, tol=tol)


def cmd_variance(p: _Params, out_dir: str, workers: int, seed: int, tol: float) -> int:
    ctx = _context_from(p, tol)
    body = ctx.as_dict()
    files = {"variance.json": _json_payload("variance", p.resolved, body)}
    _write_outputs(out_dir, files)
    print(f"variance: sigma={ctx.sigma!r} V={ctx.V!r} psi={ctx.psi!r}")
    return 0


def cmd_chf(p: _Params, out_dir: str, workers: int, seed: int, tol: float) -> int:
    sigma = p.get("sigma", cast=float, required=True)
    x = p.get("x", cast=float, required=True)
    method = p.get("method", "product", cast=str)
    r_max = p.get("r_max", 1.0, cast=float)
    if method not in ("product", "montecarlo", "moments"):
        raise ZetalabError(f"unknown chf method {method!r}")
    n_axis = int(p.get("n_axis", 11 if method == "product" else 5, cast=int))
    n_samples = int(p.get("n_samples", 50_000, cast=int))
    n_moments = int(p.get("n_moments", 6, cast=int))
    if n_axis < 1 or r_max <= 0:
        raise ZetalabError("chf grid requires n_axis >= 1 and r_max > 0")

    model = torus.make_torus_model(sigma, x)
    axis = np.linspace(-r_max, r_max, n_axis)
    rows = ["u,v,re,im,gaussian_re,abs_dev,std_error"]
    sup_dev = 0.0
    hard_ok = True
    for u in axis:
        for v in axis:
            if method == "product":
                val = torus.chf_product(model, float(u), float(v))
                se = None
            elif method == "montecarlo":
                val, se = torus.chf_montecarlo(model, float(u), float(v),
                                               n_samples=n_samples, seed=seed,
                                               workers=workers)
            else:
                val, _envelope = torus.chf_by_moments(model, float(u), float(v),
                                                      N=n_moments)
                se = None
            gauss = math.exp(-2.0 * math.pi ** 2 * (u * u + v * v))
            dev = abs(val - gauss)
            sup_dev = max(sup_dev, dev)
            if abs(val) > 1.0 + 1e-9 + (3.0 * se if se else 0.0):
                hard_ok = False
            se_s = repr(float(se)) if se is not None else ""
            rows.append(f"{float(u)!r},{float(v)!r},{val.real!r},{val.imag!r},"
                        f"{gauss!r},{dev!r},{se_s}")
    body = {
        "sigma": sigma, "x": x, "method": method,
        "V": model.V, "n_primes": model.n_primes(),
        "sup_abs_dev_from_gaussian": sup_dev,
        "modulus_bound_ok": hard_ok,
    }
    files = {
        "chf.csv": "\n".join(rows) + "\n",
        "chf.json": _json_payload("chf", p.resolved, body),
    }
    _write_outputs(out_dir, files)
    print(f"chf[{method}]: sup |chf - gaussian| = {sup_dev!r} over [{-r_max},{r_max}]^2")
    return 0 if hard_ok else 1


def cmd_dist(p: _Params, out_dir: str, workers: int, seed: int, tol: float) -> int:
    ctx = _context_from(p, tol)
    t_lo = p.get("t_lo", 50.0, cast=float)
    t_hi = p.get("t_hi", cast=float)
    count = int(p.get("count", 20_000, cast=int))
    mode = p.get("mode", "grid", cast=str)
    sampling = {"mode": mode, "count": count}
    if mode == "random":
        sampling["seed"] = seed
    sset = lab.sample_line(ctx, t_lo=t_lo, t_hi=t_hi, sampling=sampling,
                           tol=tol, workers=workers)

    disk_rs = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0]
    disks = [lab.disk_report(sset, r) for r in disk_rs]
    rects = [
        lab.rectangle_report(sset, -1.0, 1.0, -1.0, 1.0),
        lab.rectangle_report(sset, 0.0, 1.0, 0.0, 1.0),
        lab.rectangle_report(sset, -2.0, 2.0, -1.0, 1.0),
        lab.rectangle_report(sset, 0.0, 50.0, -50.0, 50.0),
    ]
    ks = lab.disk_cdf_sup(sset)
    chf_r = p.get("chf_r", cast=float)
    chf_n = int(p.get("chf_n", 11, cast=int))
    if chf_r is not None:
        axis = np.linspace(-chf_r, chf_r, chf_n)
        chf_dev = lab.chf_deviation_grid(sset, axis, axis)
    else:
        chf_dev = lab.chf_deviation_grid(sset)
    second = lab.second_moment_check(sset)

    # Hard invariants: empirical chf at the origin is exactly 1, the
    # disk CDF is monotone in r, and fractions are proper fractions.
    hard_ok = lab.empirical_chf(sset, 0.0, 0.0) == 1.0 + 0.0j
    fracs = [d.empirical_fraction for d in disks]
    hard_ok = hard_ok and all(b >= a for a, b in zip(fracs, fracs[1:]))
    hard_ok = hard_ok and all(0.0 <= f <= 1.0 for f in fracs)

    chf_rows = ["u,v,re,im,gaussian,abs_dev,envelope"]
    for rec in chf_dev["records"]:
        chf_rows.append(f"{rec['u']!r},{rec['v']!r},{rec['re']!r},{rec['im']!r},"
                        f"{rec['gaussian']!r},{rec['abs_dev']!r},"
                        f"{rec.get('envelope', float('nan'))!r}")

    body = {
        "header": sset.header(),
        "disk_reports": [d.as_dict() for d in disks],
        "rectangle_reports": [r.as_dict() for r in rects],
        "disk_cdf_sup": ks,
        "chf_sup_abs_dev": chf_dev["sup_abs_dev"],
        "second_moment": second,
        "hard_invariants_ok": bool(hard_ok),
    }
    files = {
        "dist.json": _json_payload("dist", p.resolved, body),
        "dist_chf_dev.csv": "\n".join(chf_rows) + "\n",
    }
    buf = ["t,re,im,flag"]
    for t, z, fl in zip(sset.t_values, sset.samples, sset.flags):
        re_s = repr(float(z.real)) if fl == lab.FLAG_OK else ""
        im_s = repr(float(z.imag)) if fl == lab.FLAG_OK else ""
        buf.append(f"{repr(float(t))},{re_s},{im_s},{int(fl)}")
    files["dist_samples.csv"] = "\n".join(buf) + "\n"
    _write_outputs(out_dir, files)
    print(f"dist: n_ok={sset.n_ok} excluded={sset.excluded_fraction!r} "
          f"second_moment={second!r} disk_sup={ks['sup_dev']!r} "
          f"chf_sup={chf_dev['sup_abs_dev']!r}")
    return 0 if hard_ok else 1


def cmd_torus(p: _Params, out_dir: str, workers: int, seed: int, tol: float) -> int:
    sigma = p.get("sigma", cast=float, required=True)
    x = p.get("x", cast=float, required=True)
    n_samples = int(p.get("n_samples", 100_000, cast=int))
    model = torus.make_torus_model(sigma, x)

    moments = {}
    for m, k in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (2, 2)]:
        val = torus.torus_moment_exact(model, m, k)
        moments[f"{m},{k}"] = {"re": val.real, "im": val.imag}
    mc_val, mc_se = torus.chf_montecarlo(model, 0.5, 0.25, n_samples=n_samples,
                                         seed=seed, workers=workers)
    prod_val = torus.chf_product(model, 0.5, 0.25)
    bound_checks = [torus.moment_bound_check(model, k, n_samples=20_000,
                                             seed=seed) for k in (1, 2, 3)]

    # Hard invariants: first moments vanish identically, the MC and
    # quadrature chf agree within 3 standard errors, and the absolute
    # moments respect their factorial bound.
    hard_ok = moments["1,0"]["re"] == 0.0 and moments["1,0"]["im"] == 0.0
    hard_ok = hard_ok and moments["0,1"]["re"] == 0.0 and moments["0,1"]["im"] == 0.0
    hard_ok = hard_ok and abs(mc_val - prod_val) <= 3.0 * mc_se + 1e-12
    hard_ok = hard_ok and all(c["exact_within_bound"] and c["mc_within_bound"]
                              for c in bound_checks)

    body = {
        "sigma": sigma, "x": x, "V": model.V, "n_primes": model.n_primes(),
        "n_terms": int(model.term_value.size),
        "moments_exact": moments,
        "chf_product_at_half_quarter": {"re": prod_val.real, "im": prod_val.imag},
        "chf_montecarlo_at_half_quarter": {"re": mc_val.real, "im": mc_val.imag,
                                           "std_error": mc_se, "n_samples": n_samples},
        "moment_bound_checks": bound_checks,
        "hard_invariants_ok": bool(hard_ok),
    }
    files = {"torus.json": _json_payload("torus", p.resolved, body)}
    _write_outputs(out_dir, files)
    print(f"torus: V={model.V!r} primes={model.n_primes()} "
          f"m11={moments['1,1']['re']!r} mc_vs_product="
          f"{abs(mc_val - prod_val)!r} (3se={3 * mc_se!r})")
    return 0 if hard_ok else 1


def cmd_bs(p: _Params, out_dir: str, workers: int, seed: int, tol: float) -> int:
    a = p.get("a", -1.0, cast=float)
    b = p.get("b", 1.0, cast=float)
    delta = p.get("delta", 4.0, cast=float)
    terms = int(p.get("terms", 500, cast=int))
    kinds = ("majorant", "minorant")

    results = {}
    csv_f = ["kind,x,F"]
    csv_hat = ["kind,xi,abs_f_hat"]
    hard_ok = True
    for kind in kinds:
        F = bandlimit.selberg_interval(a, b, delta, kind, terms)
        excess = bandlimit.excess_integral(F)
        want = (1.0 if kind == "majorant" else -1.0) / delta
        verify = bandlimit.verify_bandlimit(F)
        dom = bandlimit.domination_report(F)
        hard_ok = hard_ok and abs(excess - want) <= 1e-6
        hard_ok = hard_ok and dom["min_slack"] >= -1e-9
        hard_ok = hard_ok and verify["passed"]
        results[kind] = {"excess": excess, "expected_excess": want,
                         "verify": verify, "domination": dom}
        xs = np.linspace(a - 5.0 / delta, b + 5.0 / delta, 401)
        for xv, fv in zip(xs, F(xs)):
            csv_f.append(f"{kind},{float(xv)!r},{float(fv)!r}")
        xi = np.linspace(-2.5 * delta, 2.5 * delta, 201)
        vals, _ = bandlimit.fourier_transform(F, xi)
        for xv, fv in zip(xi, np.abs(vals)):
            csv_hat.append(f"{kind},{float(xv)!r},{float(fv)!r}")

    body = {"a": a, "b": b, "delta": delta, "terms": terms,
            "results": results, "hard_invariants_ok": bool(hard_ok)}
    files = {
        "bs.json": _json_payload("bs", p.resolved, body),
        "bs_f.csv": "\n".join(csv_f) + "\n",
        "bs_fhat.csv": "\n".join(csv_hat) + "\n",
    }
    _write_outputs(out_dir, files)
    print(f"bs: delta={delta!r} excess(majorant)={float(results['majorant']['excess'])!r} "
          f"(expected {1.0 / delta!r})")
    return 0 if hard_ok else 1


def cmd_scan(p: _Params, out_dir: str, workers: int, seed: int, tol: float) -> int:
    sigma = p.get("sigma", cast=float, required=True)
    x = p.get("x", cast=float, required=True)
    t_lo = p.get("t_lo", 50.0, cast=float)
    t_hi = p.get("t_hi", 200.0, cast=float)
    n_t = int(p.get("n_t", 256, cast=int))
    zeros_file = p.get("zeros_file", cast=str)
    if t_hi <= t_lo or n_t < 2:
        raise ZetalabError("scan requires t_hi > t_lo and n_t >= 2")

    if zeros_file:
        zeros = zeta.read_zero_table(zeros_file)
    else:
        if t_hi > 1000.0:
            raise ZetalabError("computing zeros above t=1000 here is too slow; "
                               "supply zeros_file")
        zeros = zeta.find_zero_ordinates(t_hi + 5.0, tol=1e-9)
    t_grid = np.linspace(t_lo, t_hi, n_t)
    result = selberg.explicit_formula_scan(sigma, x, t_grid, zeros, tol=tol)

    hard_ok = True
    max_res = result.summary["max_abs_residual"]
    if sigma > 1.0 and max_res is not None:
        bound = selberg.convergent_tail_bound(sigma, x)
        hard_ok = max_res <= 10.0 * bound

    body = {"sigma": sigma, "x": x, "t_lo": t_lo, "t_hi": t_hi, "n_t": n_t,
            "zero_count": int(zeros.gamma.size),
            "summary": result.summary,
            "hard_invariants_ok": bool(hard_ok)}
    csv_text = selberg.scan_csv_text(result)
    files = {
        "scan.json": _json_payload("scan", p.resolved, body),
        "scan.csv": csv_text,
    }
    _write_outputs(out_dir, files)
    print(f"scan: sigma={sigma!r} x={x!r} max_res={max_res!r}")
    return 0 if hard_ok else 1


def cmd_zeros(p: _Params, out_dir: str, workers: int, seed: int, tol: float) -> int:
    t_max = p.get("t_max", 100.0, cast=float)
    if t_max > 1000.0:
        raise ZetalabError("zero search is supported up to t_max = 1000")
    zeros = zeta.find_zero_ordinates(t_max, tol=tol if tol <= 1e-6 else 1e-9)
    body = {"t_max": t_max, "count": int(zeros.gamma.size),
            "coverage": float(zeros.coverage), "hard_invariants_ok": True}
    files = {
        "zeros.txt": zeta.zero_table_text(zeros),
        "zeros.json": _json_payload("zeros", p.resolved, body),
    }
    _write_outputs(out_dir, files)
    print(f"zeros: found {zeros.gamma.size} up to t={t_max!r}")
    return 0


_COMMANDS = {
    "variance": cmd_variance,
    "chf": cmd_chf,
    "dist": cmd_dist,
    "torus": cmd_torus,
    "bs": cmd_bs,
    "scan": cmd_scan,
    "zeros": cmd_zeros,
}

_FLAG_SPECS = {
    # name: (type, help)
    "sigma": (float, "real part of the sampling line"),
    "psi": (float, "regime parameter (2 sigma - 1) log T; alternative to sigma"),
    "T": (float, "height parameter"),
    "K_const": (float, "constant in the third threshold"),
    "x": (float, "prime cutoff"),
    "t_lo": (float, "lower end of the t range"),
    "t_hi": (float, "upper end of the t range"),
    "count": (int, "number of line samples"),
    "mode": (str, "sampling mode: grid or random"),
    "method": (str, "chf method: product, montecarlo, or moments"),
    "r_max": (float, "half-width of the (u, v) grid"),
    "n_axis": (int, "points per (u, v) axis"),
    "n_samples": (int, "Monte Carlo sample count"),
    "n_moments": (int, "moment order for the chf series"),
    "a": (float, "interval left end"),
    "b": (float, "interval right end"),
    "delta": (float, "band limit"),
    "terms": (int, "series truncation order"),
    "n_t": (int, "number of scan grid points"),
    "zeros_file": (str, "path to a zero-ordinate table"),
    "t_max": (float, "zero search height"),
    "chf_r": (float, "half-width of the chf deviation grid (default min(1, Omega))"),
    "chf_n": (int, "points per chf deviation axis"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zetalab",
        description="numerical laboratory for the value distribution of "
                    "zeta'/zeta near the critical line")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="JSON config file")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--tol", type=float, default=None)
        for flag, (typ, help_) in _FLAG_SPECS.items():
            sp.add_argument(f"--{flag}", type=typ, default=None, help=help_)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config or _env_lookup("config"))
        p = _Params(args, config)
        out_dir = args.out or config.get("out") or _env_lookup("out") or "."
        workers = int(args.workers or config.get("workers")
                      or _env_lookup("workers") or 1)
        seed = int(args.seed if args.seed is not None
                   else config.get("seed", _env_lookup("seed") or 0))
        tol = float(args.tol if args.tol is not None
                    else config.get("tol", _env_lookup("tol") or 1e-9))
        return _COMMANDS[args.command](p, out_dir, workers, seed, tol)
    except ZetalabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
