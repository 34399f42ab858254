"""Experiment engine: samples of zeta'/zeta along vertical lines and the
statistics comparing them with the limiting two-dimensional Gaussian.

A `LineSampleSet` holds normalized samples z_j = (zeta'/zeta)(sigma + i t_j)
divided by sqrt(V(sigma)), with per-sample status flags so points near a
zero of zeta (or points the evaluator could not certify) are excluded
from statistics while staying visible in the accounting.  Report
builders compare empirical rectangle/disk frequencies and empirical
characteristic functions against the Gaussian limit, and
`rect_prob_from_chf` reconstructs rectangle probabilities through the
band-limited majorant route, which sandwiches the direct count by
construction.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import zeta
from .arith import prime_powers_up_to
from .bandlimit import BandlimitedFunction, fourier_transform, selberg_interval
from .errors import DomainError, QuadratureError
from .variance import VarianceContext
from ._nufft import exp_sum_direct

FLAG_OK = 0
FLAG_NEAR_ZERO = 1
FLAG_PRECISION = 2

_WORKER_CHUNK = 2048  # multiple of the evaluator's internal band length
_DEFAULT_COUNT = 20_000
_WARN_EXCLUDED = 0.10


@dataclass(frozen=True)
class LineSampleSet:
    """Normalized samples of zeta'/zeta(sigma + it)/sqrt(V) with status flags."""

    context: Optional[VarianceContext]
    t_values: np.ndarray
    samples: np.ndarray
    flags: np.ndarray
    sampling: Mapping[str, object]

    def __post_init__(self):
        if not (self.t_values.shape == self.samples.shape == self.flags.shape):
            raise DomainError("t_values, samples, flags must have equal shapes")

    @property
    def n_total(self) -> int:
        return int(self.t_values.size)

    @property
    def n_ok(self) -> int:
        return int(np.count_nonzero(self.flags == FLAG_OK))

    @property
    def excluded_fraction(self) -> float:
        if self.n_total == 0:
            return 0.0
        return 1.0 - self.n_ok / self.n_total

    @property
    def warning(self) -> bool:
        """True when more than 10% of the samples were excluded."""
        return self.n_total > 0 and self.excluded_fraction > _WARN_EXCLUDED

    def ok_samples(self) -> np.ndarray:
        return self.samples[self.flags == FLAG_OK]

    def flag_counts(self) -> dict:
        return {
            "ok": self.n_ok,
            "near_zero": int(np.count_nonzero(self.flags == FLAG_NEAR_ZERO)),
            "precision_fail": int(np.count_nonzero(self.flags == FLAG_PRECISION)),
        }

    def header(self) -> dict:
        head = {
            "n_total": self.n_total,
            "excluded_fraction": self.excluded_fraction,
            "warning": self.warning,
            "sampling": dict(self.sampling),
        }
        head.update(self.flag_counts())
        if self.context is not None:
            head["context"] = self.context.as_dict()
        return head


def _eval_line_chunk(args):
    sigma, t_chunk, tol = args
    return zeta.log_deriv_band(sigma, t_chunk, tol=tol)


def sample_line(context: VarianceContext, t_lo: float = 50.0,
                t_hi: float | None = None, sampling: Mapping | None = None,
                tol: float = 1e-9, workers: int = 1) -> LineSampleSet:
    """Sample zeta'/zeta(sigma+it)*V^(-1/2) over [t_lo, t_hi].

    sampling: {"mode": "grid", "count": N} (or "dt": spacing), or
    {"mode": "random", "count": N, "seed": S}.  Default is an equispaced
    grid of 20000 points.  Near-zero and uncertified points are flagged,
    not raised.  The evaluation is partitioned into fixed 2048-point
    chunks whose results are merged in order, so the output is
    bit-identical for every worker count.
    """
    t_hi = float(context.T) if t_hi is None else float(t_hi)
    t_lo = float(t_lo)
    if t_hi < t_lo:
        raise DomainError(f"t range reversed: [{t_lo}, {t_hi}]")
    if t_hi > zeta.HEIGHT_CAP:
        raise DomainError(f"t_hi {t_hi} exceeds the evaluator height cap {zeta.HEIGHT_CAP}")
    spec = dict(sampling) if sampling is not None else {"mode": "grid"}
    mode = spec.get("mode", "grid")

    if t_hi == t_lo:
        t = np.empty(0)
        canonical = {"mode": mode, "count": 0, "t_lo": t_lo, "t_hi": t_hi}
    elif mode == "grid":
        if "dt" in spec:
            dt = float(spec["dt"])
            if dt <= 0:
                raise DomainError("grid spacing must be positive")
            count = int(math.floor((t_hi - t_lo) / dt)) + 1
            t = t_lo + dt * np.arange(count)
        else:
            count = int(spec.get("count", _DEFAULT_COUNT))
            if count < 0:
                raise DomainError("count must be nonnegative")
            t = np.linspace(t_lo, t_hi, count)
        canonical = {"mode": "grid", "count": int(t.size), "t_lo": t_lo, "t_hi": t_hi}
    elif mode == "random":
        count = int(spec.get("count", _DEFAULT_COUNT))
        seed = int(spec.get("seed", 0))
        rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
        t = np.sort(t_lo + (t_hi - t_lo) * rng.random(count))
        canonical = {"mode": "random", "count": count, "seed": seed,
                     "t_lo": t_lo, "t_hi": t_hi}
    else:
        raise DomainError(f"unknown sampling mode {mode!r}")

    n = t.size
    values = np.empty(n, dtype=complex)
    flags = np.empty(n, dtype=np.uint8)
    if n:
        chunks = [(context.sigma, t[i:i + _WORKER_CHUNK], tol)
                  for i in range(0, n, _WORKER_CHUNK)]
        if workers > 1 and len(chunks) > 1:
            with ProcessPoolExecutor(max_workers=int(workers)) as pool:
                results = list(pool.map(_eval_line_chunk, chunks))
        else:
            results = [_eval_line_chunk(c) for c in chunks]
        pos = 0
        for vals_c, flags_c in results:
            values[pos:pos + vals_c.size] = vals_c
            flags[pos:pos + vals_c.size] = flags_c
            pos += vals_c.size

    scale = 1.0 / math.sqrt(context.V)
    samples = values * scale
    samples[flags != FLAG_OK] = np.nan
    return LineSampleSet(context=context, t_values=t, samples=samples,
                         flags=flags, sampling=canonical)


def synthetic_gaussian_set(count: int, seed: int = 0,
                           context: VarianceContext | None = None) -> LineSampleSet:
    """Synthetic 2D standard Gaussian sample set for pipeline self-tests."""
    if count < 0:
        raise DomainError("count must be nonnegative")
    rng = np.random.Generator(np.random.Philox(key=[int(seed), 1]))
    pairs = rng.standard_normal((int(count), 2))
    samples = pairs[:, 0] + 1j * pairs[:, 1]
    return LineSampleSet(context=context,
                         t_values=np.arange(int(count), dtype=float),
                         samples=samples,
                         flags=np.zeros(int(count), dtype=np.uint8),
                         sampling={"mode": "synthetic-gaussian",
                                   "count": int(count), "seed": int(seed)})


def empirical_chf(sset: LineSampleSet, u: float, v: float) -> complex:
    """Empirical characteristic function: mean of e(u Re z + v Im z) over ok-samples."""
    z = sset.ok_samples()
    if z.size == 0:
        raise DomainError("empirical chf of an empty sample set")
    phase = 2.0 * np.pi * (float(u) * z.real + float(v) * z.imag)
    return complex(np.mean(np.exp(1j * phase)))


def empirical_chf_grid(sset: LineSampleSet, u_axis, v_axis,
                       chunk: int = 4096) -> np.ndarray:
    """Empirical chf on a tensor grid: out[i, j] = chf(u_i, v_j).

    Factorizes e(u X + v Y) = e(u X) e(v Y) and accumulates a matrix
    product over fixed-size sample chunks, so the cost is a pair of
    thin matrices per chunk instead of a full 3D phase array.
    """
    z = sset.ok_samples()
    if z.size == 0:
        raise DomainError("empirical chf of an empty sample set")
    u = np.atleast_1d(np.asarray(u_axis, dtype=float))
    v = np.atleast_1d(np.asarray(v_axis, dtype=float))
    acc = np.zeros((u.size, v.size), dtype=complex)
    for i in range(0, z.size, chunk):
        zc = z[i:i + chunk]
        A = np.exp((2j * np.pi) * np.outer(u, zc.real))
        B = np.exp((2j * np.pi) * np.outer(v, zc.imag))
        acc += A @ B.T
    return acc / z.size


def gaussian_chf(u, v):
    """Characteristic function of the standard complex Gaussian: e^(-2 pi^2 (u^2+v^2))."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.exp(-2.0 * np.pi ** 2 * (u ** 2 + v ** 2))


def chf_deviation_grid(sset: LineSampleSet, u_axis=None, v_axis=None) -> dict:
    """Tabulate |empirical chf - Gaussian chf| on a (u, v) grid.

    Also evaluates, with unit implied constants, the theoretical
    envelope gaussian*((|u|+|v|)^3/V^(3/2) + (u^2+v^2)/psi^10) + psi^(-10)
    when the set carries a line context; the envelope is reported, not
    asserted.  Returns records plus sup statistics.
    """
    ctx = sset.context
    if u_axis is None or v_axis is None:
        r = 1.0
        if ctx is not None:
            r = min(1.0, ctx.Omega)
        axis = np.linspace(-r, r, 11)
        u_axis = axis if u_axis is None else u_axis
        v_axis = axis if v_axis is None else v_axis
    u_axis = np.atleast_1d(np.asarray(u_axis, dtype=float))
    v_axis = np.atleast_1d(np.asarray(v_axis, dtype=float))
    grid = empirical_chf_grid(sset, u_axis, v_axis)

    records = []
    sup_dev = 0.0
    sup_at = (0.0, 0.0)
    sup_ratio = 0.0
    for i, u in enumerate(u_axis):
        for j, v in enumerate(v_axis):
            gauss = float(gaussian_chf(u, v))
            val = grid[i, j]
            dev = abs(val - gauss)
            rec = {"u": float(u), "v": float(v),
                   "re": float(val.real), "im": float(val.imag),
                   "gaussian": gauss, "abs_dev": float(dev)}
            if ctx is not None:
                env_a = ((abs(u) + abs(v)) ** 3 / ctx.V ** 1.5
                         + (u * u + v * v) / ctx.psi ** 10)
                env = gauss * env_a + ctx.psi ** -10
                rec["envelope"] = float(env)
                rec["dev_over_envelope"] = float(dev / env) if env > 0 else float("inf")
                if env > 0:
                    sup_ratio = max(sup_ratio, dev / env)
            records.append(rec)
            if dev > sup_dev:
                sup_dev = float(dev)
                sup_at = (float(u), float(v))
    return {
        "records": records,
        "sup_abs_dev": sup_dev,
        "sup_at_u": sup_at[0],
        "sup_at_v": sup_at[1],
        "sup_dev_over_envelope": float(sup_ratio) if ctx is not None else None,
        "n_ok": sset.n_ok,
        "excluded_fraction": sset.excluded_fraction,
    }


@dataclass(frozen=True)
class DistributionReport:
    """Empirical frequency of a region against its Gaussian prediction."""

    region: Mapping[str, float]
    empirical_fraction: float
    gaussian_prediction: float
    error_scale: Optional[float]
    excluded_fraction: float
    n_ok: int
    std_error: float
    extras: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not (0.0 <= self.empirical_fraction <= 1.0):
            raise DomainError(f"empirical fraction {self.empirical_fraction} outside [0, 1]")

    def as_dict(self) -> dict:
        out = {"region": dict(self.region),
               "empirical_fraction": self.empirical_fraction,
               "gaussian_prediction": self.gaussian_prediction,
               "error_scale": self.error_scale,
               "excluded_fraction": self.excluded_fraction,
               "n_ok": self.n_ok,
               "std_error": self.std_error}
        out.update({k: v for k, v in self.extras.items()})
        return out


def _std_normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def _binomial_se(frac: float, n: int) -> float:
    if n <= 0:
        return float("nan")
    return math.sqrt(max(frac * (1.0 - frac), 0.0) / n)


def rectangle_report(sset: LineSampleSet, a: float, b: float,
                     c: float, d: float) -> DistributionReport:
    """Empirical fraction with Re in [a,b], Im in [c,d] vs the Gaussian law.

    The prediction factorizes over coordinates since the limit has
    independent standard real and imaginary parts.  The error scale is
    (meas(R) + 1) / bOmega when a context is attached.
    """
    if b < a or d < c:
        raise DomainError("rectangle sides reversed")
    z = sset.ok_samples()
    if z.size == 0:
        raise DomainError("report on an empty sample set")
    inside = (z.real >= a) & (z.real <= b) & (z.imag >= c) & (z.imag <= d)
    frac = float(np.count_nonzero(inside)) / z.size
    pred = ((_std_normal_cdf(b) - _std_normal_cdf(a))
            * (_std_normal_cdf(d) - _std_normal_cdf(c)))
    scale = None
    if sset.context is not None:
        meas = (b - a) * (d - c)
        scale = (meas + 1.0) / sset.context.bOmega
    return DistributionReport(
        region={"type": "rectangle", "a": float(a), "b": float(b),
                "c": float(c), "d": float(d)},
        empirical_fraction=frac,
        gaussian_prediction=float(pred),
        error_scale=scale,
        excluded_fraction=sset.excluded_fraction,
        n_ok=int(z.size),
        std_error=_binomial_se(frac, z.size),
    )


def disk_report(sset: LineSampleSet, r: float) -> DistributionReport:
    """Empirical fraction with |z| <= r vs the Gaussian prediction 1 - e^(-r^2/2).

    The error scale is (r^2 + r)/bOmega.  In the small-radius regime
    (only meaningful once r*tOmega >= 1) the ratio fraction/r^2 is
    reported as well, matching the quadratic small-ball bound.
    """
    r = float(r)
    if r < 0:
        raise DomainError("disk radius must be nonnegative")
    z = sset.ok_samples()
    if z.size == 0:
        raise DomainError("report on an empty sample set")
    frac = float(np.count_nonzero(np.abs(z) <= r)) / z.size
    pred = 1.0 - math.exp(-0.5 * r * r)
    scale = None
    extras = {}
    if sset.context is not None:
        scale = (r * r + r) / sset.context.bOmega
        if r > 0 and r * sset.context.tOmega >= 1.0:
            extras["small_r_fraction_over_r_sq"] = frac / (r * r)
    return DistributionReport(
        region={"type": "disk", "r": r},
        empirical_fraction=frac,
        gaussian_prediction=float(pred),
        error_scale=scale,
        excluded_fraction=sset.excluded_fraction,
        n_ok=int(z.size),
        std_error=_binomial_se(frac, z.size),
        extras=extras,
    )


def disk_cdf_sup(sset: LineSampleSet) -> dict:
    """Exact sup over r of |empirical P(|z| <= r) - (1 - e^(-r^2/2))|.

    The empirical CDF is a step function, so the supremum is attained
    at a jump; this is the Kolmogorov-Smirnov statistic against the
    Rayleigh-squared law of |Z| for a standard complex Gaussian.
    """
    z = sset.ok_samples()
    if z.size == 0:
        raise DomainError("report on an empty sample set")
    radii = np.sort(np.abs(z))
    n = radii.size
    cdf = 1.0 - np.exp(-0.5 * radii * radii)
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    i_up = int(np.argmax(upper))
    i_lo = int(np.argmax(lower))
    if upper[i_up] >= lower[i_lo]:
        sup, at = float(upper[i_up]), float(radii[i_up])
    else:
        sup, at = float(lower[i_lo]), float(radii[i_lo])
    return {"sup_dev": sup, "at_r": at, "n_ok": n}


def second_moment_check(sset: LineSampleSet) -> float:
    """Mean of |z|^2 over ok-samples; the Gaussian limit value is 2."""
    z = sset.ok_samples()
    if z.size == 0:
        raise DomainError("second moment of an empty sample set")
    return float(np.mean(z.real ** 2 + z.imag ** 2))


@dataclass(frozen=True)
class SandwichProb:
    """Lower/upper rectangle-probability estimates from the chf route."""

    lower: float
    upper: float
    nodes_per_axis: int
    doubling_delta: float
    details: Mapping[str, float] = field(default_factory=dict)

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _axis_nodes(delta: float, rate: float, level: int):
    """Panel GL nodes/weights on [-delta, delta] resolving e(rate*u) oscillation.

    The 0.25 cap keeps smooth-but-sharp factors (a Gaussian chf decays
    on the scale 1/(2 pi)) resolved even when the nominal rate is low.
    """
    from .bandlimit import _panel_nodes
    max_len = min(10.0 / (2.0 * np.pi * max(rate, 1e-9)), 0.25, delta / 2.0) / level
    return _panel_nodes(-delta, delta, max_len)


def rect_prob_from_chf(chf, F: BandlimitedFunction, G: BandlimitedFunction,
                       osc_rate_u: float = 6.0, osc_rate_v: float = 6.0,
                       quad_tol: float = 2e-5) -> SandwichProb:
    """Rectangle probability reconstructed from a characteristic function.

    chf(u_axis, v_axis) must return the matrix chf(u_i, v_j).  F and G
    are the band-limited majorants of the Re- and Im-intervals; their
    minorant partners are built internally.  By Fourier inversion the
    double integral of Fhat(u) Ghat(v) chf(u, v) over the band equals
    the expectation of F(X) G(Y), so pointwise domination of the
    indicators makes [lower, upper] a true sandwich of the rectangle
    probability up to quadrature error, which is controlled by a
    node-doubling check (failure raises QuadratureError).

    osc_rate_u/v: scale of the fastest oscillation of chf in each
    variable (max |Re z|, |Im z| for an empirical chf); the quadrature
    panels are sized to resolve it.
    """
    if F.kind != "majorant" or G.kind != "majorant":
        raise DomainError("pass the majorants; minorants are derived internally")
    F_minus = selberg_interval(F.a, F.b, F.delta, "minorant", F.series_terms)
    G_minus = selberg_interval(G.a, G.b, G.delta, "minorant", G.series_terms)
    # Fhat(u) itself oscillates at the spatial scale of its interval
    # (plus the tails of F), so fold that into the panel sizing.
    rate_u = osc_rate_u + max(abs(F.a), abs(F.b)) + 5.0 / F.delta
    rate_v = osc_rate_v + max(abs(G.a), abs(G.b)) + 5.0 / G.delta

    def sandwich(level: int):
        u, wu = _axis_nodes(F.delta, rate_u, level)
        v, wv = _axis_nodes(G.delta, rate_v, level)
        fp, _ = fourier_transform(F, u)
        fm, _ = fourier_transform(F_minus, u)
        gp, _ = fourier_transform(G, v)
        gm, _ = fourier_transform(G_minus, v)
        M = np.asarray(chf(u, v), dtype=complex)
        if M.shape != (u.size, v.size):
            raise DomainError("chf callable must return a (len(u), len(v)) matrix")
        wfp = wu * fp
        wfm = wu * fm
        wgp = wv * gp
        wgm = wv * gm
        I_pp = (wfp @ M @ wgp).real
        I_mp = (wfm @ M @ wgp).real
        I_pm = (wfp @ M @ wgm).real
        upper = I_pp
        lower = I_mp + I_pm - I_pp
        return lower, upper, u.size

    lo1, up1, n1 = sandwich(1)
    lo2, up2, n2 = sandwich(2)
    delta_q = max(abs(lo2 - lo1), abs(up2 - up1))
    if delta_q > quad_tol:
        raise QuadratureError(
            f"chf-quadrature doubling failed: delta {delta_q:.3e} > {quad_tol:.1e}")
    return SandwichProb(lower=float(lo2), upper=float(up2), nodes_per_axis=int(n2),
                        doubling_delta=float(delta_q),
                        details={"lower_coarse": float(lo1), "upper_coarse": float(up1)})


def sample_prime_poly(sigma: float, x: float, t_values) -> np.ndarray:
    """Unnormalized prime-power polynomial sum over p^n <= x of
    log(p) p^(-n(sigma+it)) at each t (plain weight, sharp cutoff)."""
    t = np.asarray(t_values, dtype=float)
    table = prime_powers_up_to(x)
    if table.value.size == 0:
        return np.zeros(t.shape, dtype=complex)
    coeff = table.log_prime * table.value ** (-float(sigma))
    omega = np.log(table.value.astype(float))
    return exp_sum_direct(omega, coeff.astype(complex), t)


def time_vs_torus_moments(poly_samples, model, m: int, k: int) -> dict:
    """Compare t-averaged moments of the normalized prime polynomial with
    the exact torus moments.

    poly_samples: unnormalized polynomial values f(t) (as from
    sample_prime_poly); they are normalized by sqrt(model.V) here.
    Requires m, k <= 2 (the regime where the time average is reliable
    at desk scale).
    """
    from .torus import torus_moment_exact
    if not (0 <= m <= 2 and 0 <= k <= 2):
        raise DomainError("moment orders are limited to m, k <= 2")
    f = np.asarray(poly_samples, dtype=complex) / math.sqrt(model.V)
    if f.size == 0:
        raise DomainError("empty polynomial sample set")
    time_avg = complex(np.mean(f ** m * np.conj(f) ** k))
    torus_val = torus_moment_exact(model, m, k)
    return {
        "m": int(m),
        "k": int(k),
        "time_avg_re": time_avg.real,
        "time_avg_im": time_avg.imag,
        "torus_re": torus_val.real,
        "torus_im": torus_val.imag,
        "abs_discrepancy": abs(time_avg - torus_val),
        "n_samples": int(f.size),
    }


def write_samples_csv(sset: LineSampleSet, path) -> None:
    """Dump a sample set as CSV rows t,re,im,flag (floats via repr)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,re,im,flag\n")
        for t, z, fl in zip(sset.t_values, sset.samples, sset.flags):
            re_s = repr(float(z.real)) if fl == FLAG_OK else ""
            im_s = repr(float(z.imag)) if fl == FLAG_OK else ""
            fh.write(f"{repr(float(t))},{re_s},{im_s},{int(fl)}\n")
