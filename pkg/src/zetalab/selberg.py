"""Weighted explicit-formula machinery: the smoothing weight w_x(n), the
local validity threshold sigma_xt, weighted/plain prime-power Dirichlet
polynomials, and residual scans quantifying how well the weighted polynomial
tracks -zeta'/zeta along a line.

The weight is 1 up to x, then decays through two quadratic-in-log branches
and vanishes beyond x^3, staying inside [0, 1] with continuous joins. The
threshold sigma_xt gates where the approximation is trusted: it exceeds 1/2
by twice the larger of (nearby zero's beta - 1/2) and 2/log x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._nufft import NufftSum, exp_sum_direct
from .arith import TABLE_CAP_DEFAULT, lambda_segments, prime_powers_up_to
from .errors import CoverageError, DomainError
from .zeta import ZeroList, log_deriv_band


@dataclass(frozen=True)
class SelbergWeightSpec:
    """Weight parameters: cut point x >= 10 and the branch-3 convention.

    normalized_branch3=True (default) divides the third branch by 2 log^2 x,
    which keeps the weight within [0, 1] and continuous at x^2; the
    unnormalized variant is retained for fidelity experiments.
    """

    x: float
    normalized_branch3: bool = True

    def __post_init__(self):
        if self.x < 10:
            raise DomainError(f"weight requires x >= 10, got {self.x:g}")


def weight_w(n, spec: SelbergWeightSpec):
    """Piecewise smoothing weight w_x(n); scalar or ndarray in, like out.

    Branches (L = log x, l = log n):
      n <= x          : 1
      x < n <= x^2    : ((3L - l)^2 - 2(2L - l)^2) / (2 L^2)
      x^2 < n <= x^3  : (3L - l)^2 / (2 L^2)   [normalized branch]
      n > x^3         : 0
    """
    x = spec.x
    arr = np.asarray(n, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(arr < 1):
        raise DomainError("weight_w requires n >= 1")
    L = math.log(x)
    ell = np.log(arr)
    out = np.zeros(arr.shape, dtype=np.float64)
    out[arr <= x] = 1.0
    mid = (arr > x) & (arr <= x * x)
    if np.any(mid):
        a = 3.0 * L - ell[mid]
        b = 2.0 * L - ell[mid]
        out[mid] = (a * a - 2.0 * b * b) / (2.0 * L * L)
    top = (arr > x * x) & (arr <= x * x * x)
    if np.any(top):
        a = 3.0 * L - ell[top]
        out[top] = a * a / (2.0 * L * L) if spec.normalized_branch3 else a * a
    return float(out[0]) if scalar else out


def weight_branch_gaps(x: float, normalized_branch3: bool = True) -> dict:
    """|left - right| of adjacent branch formulas at the joins x, x^2, x^3.

    Evaluates the closed-form branches at the exact breakpoints in floating
    point; the joins are analytically continuous (1, 1/2, 0), so the gaps
    measure pure rounding.
    """
    L = math.log(x)

    def branch2(ell):
        return ((3 * L - ell) ** 2 - 2 * (2 * L - ell) ** 2) / (2 * L * L)

    def branch3(ell):
        v = (3 * L - ell) ** 2
        return v / (2 * L * L) if normalized_branch3 else v

    return {
        "at_x": abs(1.0 - branch2(L)),
        "at_x2": abs(branch2(2 * L) - branch3(2 * L)),
        "at_x3": abs(branch3(3 * L) - 0.0),
    }


def _qualifying_window(x: float, beta: np.ndarray) -> np.ndarray:
    return x ** (3.0 * np.abs(beta - 0.5)) / math.log(x)


def sigma_xt(x: float, t: float, zeros: ZeroList) -> float:
    """Local explicit-formula threshold 1/2 + 2 max(max_q(beta - 1/2), 2/log x).

    A zero qualifies when |t - gamma| (or |t + gamma|, by conjugate symmetry
    of the zero set) is at most x^{3|beta-1/2|}/log x. The zero list must
    cover the largest such window around t for its own betas.
    """
    if x < 2:
        raise DomainError(f"sigma_xt requires x >= 2, got {x:g}")
    if t <= 0:
        raise DomainError(f"sigma_xt requires t > 0, got {t:g}")
    L = math.log(x)
    if len(zeros):
        wmax = float(np.max(_qualifying_window(x, zeros.beta)))
    else:
        wmax = 1.0 / L
    if zeros.coverage < t + wmax:
        raise CoverageError(
            f"zero list coverage {zeros.coverage:g} below t + window = "
            f"{t + wmax:g}"
        )
    best = 2.0 / L
    if len(zeros):
        win = _qualifying_window(x, zeros.beta)
        hit = (np.abs(t - zeros.gamma) <= win) | (np.abs(t + zeros.gamma) <= win)
        if np.any(hit):
            best = max(best, float(np.max(zeros.beta[hit] - 0.5)))
    return 0.5 + 2.0 * best


def _fsum_complex(re_terms: np.ndarray, im_terms: np.ndarray) -> complex:
    return complex(math.fsum(re_terms.tolist()), math.fsum(im_terms.tolist()))


def dirichlet_poly_plain(
    s: complex, x: float, cap: int = TABLE_CAP_DEFAULT
) -> complex:
    """sum_{n <= x} Lambda(n) n^{-s}, compensated summation, x < 2 -> 0."""
    s = complex(s)
    if x < 2:
        return 0.0 + 0.0j
    table = prime_powers_up_to(x, cap=cap)
    v = table.value.astype(np.float64)
    amp = table.log_prime * v**-s.real
    ph = s.imag * np.log(v)
    return _fsum_complex(amp * np.cos(ph), -amp * np.sin(ph))


def dirichlet_poly_weighted(
    s: complex, spec: SelbergWeightSpec, cap: int = TABLE_CAP_DEFAULT
) -> complex:
    """sum_{n <= x^3} w_x(n) Lambda(n) n^{-s}, compensated summation.

    Materializes the prime-power table to x^3, so the cap applies; scans over
    large x should use explicit_formula_scan, which streams segments instead.
    """
    s = complex(s)
    x3 = spec.x**3
    table = prime_powers_up_to(x3, cap=cap)
    v = table.value.astype(np.float64)
    w = weight_w(v, spec)
    amp = w * table.log_prime * v**-s.real
    ph = s.imag * np.log(v)
    return _fsum_complex(amp * np.cos(ph), -amp * np.sin(ph))


@dataclass(frozen=True)
class ScanResult:
    """Per-point residual records plus run-level summary statistics.

    Arrays are aligned with the input grid. flags: 0 ok, 1 = sigma below the
    local threshold (point not evaluated), 2 = near-zero zeta (flagged by the
    engine). residual = lhs - poly at ok points, NaN elsewhere.
    """

    t: np.ndarray
    lhs: np.ndarray
    poly: np.ndarray
    residual: np.ndarray
    bound: np.ndarray
    flags: np.ndarray
    summary: dict


def _is_equispaced(t: np.ndarray) -> bool:
    if t.shape[0] < 16:
        return False
    d = np.diff(t)
    return bool(np.all(np.abs(d - d[0]) <= 1e-9 * abs(d[0])))


def _weighted_poly_grid(
    sigma: float, x: float, t: np.ndarray, normalized_branch3: bool
) -> np.ndarray:
    """Weighted polynomial on a t grid, streaming prime powers to x^3.

    Equispaced grids go through the type-1 NUFFT (one pass over the sieve
    segments, one FFT); other grids fall back to direct chunked summation.
    Both paths consume identical per-segment coefficients.
    """
    spec = SelbergWeightSpec(x=x, normalized_branch3=normalized_branch3)
    x3 = x**3
    equi = _is_equispaced(t)
    if equi:
        t0 = float(t[0])
        dt = float(t[1] - t[0])
        acc = NufftSum(n_out=t.shape[0])
    pieces_val: list[np.ndarray] = []
    pieces_coeff: list[np.ndarray] = []
    for value, logp in lambda_segments(1, x3):
        v = value.astype(np.float64)
        w = weight_w(v, spec)
        coeff = w * logp * v**-sigma
        lv = np.log(v)
        if equi:
            phases = np.mod(dt * lv, 2.0 * math.pi)
            acc.add(phases, coeff * np.exp(-1j * t0 * lv))
        else:
            pieces_val.append(lv)
            pieces_coeff.append(coeff.astype(np.complex128))
    if equi:
        return acc.finish()
    omega = np.concatenate(pieces_val) if pieces_val else np.zeros(0)
    coeff = (
        np.concatenate(pieces_coeff) if pieces_coeff else np.zeros(0, complex)
    )
    return exp_sum_direct(omega, coeff, t)


def convergent_tail_bound(sigma: float, x: float) -> float:
    """Upper bound for sum_{n > x} Lambda(n) n^{-sigma}, sigma > 1.

    Uses Lambda(n) <= log n and the closed-form integral of log u * u^{-sigma};
    bounds the full modification error of the weighted polynomial relative to
    the absolutely convergent series (weights only differ from 1 above x).
    """
    if sigma <= 1.0:
        raise DomainError("convergent tail bound needs sigma > 1")
    a = sigma - 1.0
    lx = math.log(x)
    return x**-a * (lx / a + 1.0 / (a * a)) + lx * x**-sigma


def explicit_formula_scan(
    sigma: float,
    x: float,
    t_grid: np.ndarray,
    zeros: ZeroList,
    tol: float = 1e-9,
    normalized_branch3: bool = True,
) -> ScanResult:
    """Residuals lhs - poly over a t grid, with threshold gating.

    lhs = -zeta'/zeta(sigma + it); poly = the weighted polynomial at the same
    point; bound is the standard envelope x^{(1/2-sigma)/2} (|poly| + log t).
    Points with sigma < sigma_xt are flagged and skipped (flag 1), as are
    near-zero zeta points (flag 2). The summary reports flag counts and
    quantiles of |residual|/bound over ok points.
    """
    t = np.asarray(t_grid, dtype=np.float64)
    if t.ndim != 1 or t.shape[0] == 0:
        raise DomainError("t_grid must be a nonempty 1-d array")
    if np.any(t <= 0) or not np.all(np.diff(t) > 0):
        raise DomainError("t_grid must be positive and strictly increasing")

    # Threshold gate. The per-point threshold only varies where some zero's
    # qualifying window is entered, so evaluate it by sweeping the zero list
    # once instead of calling sigma_xt per point.
    L = math.log(x)
    if len(zeros):
        wmax = float(np.max(_qualifying_window(x, zeros.beta)))
    else:
        wmax = 1.0 / L
    if zeros.coverage < float(t[-1]) + wmax:
        raise CoverageError(
            f"zero list coverage {zeros.coverage:g} below t_max + window"
        )
    best = np.full(t.shape[0], 2.0 / L)
    for b, g in zip(zeros.beta, zeros.gamma):
        win = x ** (3.0 * abs(b - 0.5)) / L
        hit = (np.abs(t - g) <= win) | (np.abs(t + g) <= win)
        if b - 0.5 > 2.0 / L:
            best[hit] = np.maximum(best[hit], b - 0.5)
    threshold = 0.5 + 2.0 * best
    flags = np.zeros(t.shape[0], dtype=np.uint8)
    flags[sigma < threshold] = 1

    lhs_raw, engine_flags = log_deriv_band(sigma, t, tol=tol)
    flags[(flags == 0) & (engine_flags != 0)] = 2
    lhs = -lhs_raw

    poly = _weighted_poly_grid(sigma, x, t, normalized_branch3)
    ok = flags == 0
    residual = np.where(ok, lhs - poly, np.nan + 1j * np.nan)
    bound = x ** ((0.5 - sigma) / 2.0) * (np.abs(poly) + np.log(t))

    ratios = np.abs(residual[ok]) / bound[ok]
    summary = {
        "sigma": float(sigma),
        "x": float(x),
        "n_points": int(t.shape[0]),
        "n_ok": int(np.count_nonzero(ok)),
        "n_flagged_sigma_gate": int(np.count_nonzero(flags == 1)),
        "n_flagged_near_zero": int(np.count_nonzero(flags == 2)),
        "flagged_fraction": float(np.count_nonzero(flags != 0) / t.shape[0]),
        "ratio_q50": float(np.quantile(ratios, 0.5)) if ratios.size else None,
        "ratio_q90": float(np.quantile(ratios, 0.9)) if ratios.size else None,
        "ratio_q99": float(np.quantile(ratios, 0.99)) if ratios.size else None,
        "ratio_max": float(np.max(ratios)) if ratios.size else None,
        "max_abs_residual": float(np.max(np.abs(residual[ok]))) if ratios.size else None,
        "convergent_tail_bound": (
            convergent_tail_bound(sigma, x) if sigma > 1.0 else None
        ),
    }
    return ScanResult(
        t=t, lhs=lhs, poly=poly, residual=residual, bound=bound, flags=flags,
        summary=summary,
    )


def scan_csv_text(result: ScanResult) -> str:
    """CSV text: t, lhs_re, lhs_im, poly_re, poly_im, res_abs, bound, flagged."""
    rows = ["t,lhs_re,lhs_im,poly_re,poly_im,res_abs,bound,flagged"]
    for i in range(result.t.shape[0]):
        flagged = 1 if result.flags[i] else 0
        res_abs = (
            float(abs(result.residual[i])) if result.flags[i] == 0 else float("nan")
        )
        rows.append(
            f"{float(result.t[i])!r},{float(result.lhs[i].real)!r},"
            f"{float(result.lhs[i].imag)!r},{float(result.poly[i].real)!r},"
            f"{float(result.poly[i].imag)!r},{res_abs!r},"
            f"{float(result.bound[i])!r},{flagged}"
        )
    return "\n".join(rows) + "\n"


def write_scan_csv(path, result: ScanResult) -> None:
    """CSV dump of a scan; see scan_csv_text for the column layout."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(scan_csv_text(result))
