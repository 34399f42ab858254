"""Type-1 nonuniform FFT by Gaussian gridding (Greengard-Lee style).

Computes out[j] = sum_k c_k exp(-i j phi_k) for j = 0..n_out-1, with the
phases phi_k anywhere in [0, 2pi). Sources are spread onto an oversampled
uniform grid with a truncated Gaussian window, then one FFT and a
deconvolution recover the modes. With oversampling 2 and spreading width 14
the relative accuracy is ~3e-13 (validated against direct summation), far
below every tolerance used by callers.

The accumulator form lets callers stream arbitrarily large source sets
segment by segment: spreading is additive, and the FFT happens once at the
end. Results are independent of how sources are batched.
"""

from __future__ import annotations

import math

import numpy as np


class NufftSum:
    """Streaming accumulator for sum_k c_k exp(-i j phi_k)."""

    def __init__(self, n_out: int, ratio: int = 2, spread: int = 14):
        if n_out < 1:
            raise ValueError("n_out must be positive")
        self.n_out = int(n_out)
        M = 2 * self.n_out
        self.Mr = ratio * M
        self.spread = spread
        self.tau = math.pi * spread / (M * M * ratio * (ratio - 0.5))
        self.h = 2.0 * math.pi / self.Mr
        self._grid_re = np.zeros(self.Mr)
        self._grid_im = np.zeros(self.Mr)

    def add(self, phi: np.ndarray, c: np.ndarray) -> None:
        """Spread sources with phases phi (radians) and complex weights c."""
        phi = np.asarray(phi, dtype=np.float64)
        c = np.asarray(c, dtype=np.complex128)
        if phi.shape != c.shape:
            raise ValueError("phi and c must have equal shape")
        if phi.size == 0:
            return
        tau, h, Mr = self.tau, self.h, self.Mr
        x = np.mod(-phi, 2.0 * math.pi)
        i0 = np.rint(x / h).astype(np.int64)
        d = x - i0 * h
        E0 = c * np.exp(-d * d / (4.0 * tau))
        E1 = np.exp(d * h / (2.0 * tau))
        Epos = np.ones(phi.shape[0])
        Eneg = np.ones(phi.shape[0])
        for m in range(self.spread + 1):
            if m > 0:
                Epos = Epos * E1
                Eneg = Eneg / E1
            g2 = math.exp(-((m * h) ** 2) / (4.0 * tau))
            for sgn in (0,) if m == 0 else (1, -1):
                Em = 1.0 if m == 0 else (Epos if sgn > 0 else Eneg)
                w = E0 * Em * g2
                idx = np.mod(i0 + sgn * m, Mr)
                self._grid_re += np.bincount(idx, weights=w.real, minlength=Mr)
                self._grid_im += np.bincount(idx, weights=w.imag, minlength=Mr)

    def finish(self) -> np.ndarray:
        """Modes 0..n_out-1. The accumulator stays valid for further add()s."""
        spectrum = np.fft.ifft(self._grid_re + 1j * self._grid_im)
        j = np.arange(self.n_out, dtype=np.float64)
        deconv = math.sqrt(math.pi / self.tau) * np.exp(j * j * self.tau)
        return spectrum[: self.n_out] * deconv


def exp_sum_direct(omega: np.ndarray, c: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Direct evaluation of sum_k c_k exp(-i t_j omega_k), chunked.

    The slow exact reference for NufftSum, and the general-grid fallback.
    """
    omega = np.asarray(omega, dtype=np.float64)
    c = np.asarray(c, dtype=np.complex128)
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros(t.shape[0], dtype=np.complex128)
    step = max(1, 4_000_000 // max(1, t.shape[0]))
    for lo in range(0, omega.shape[0], step):
        hi = min(lo + step, omega.shape[0])
        ph = np.outer(t, omega[lo:hi])
        out += np.cos(ph) @ c[lo:hi] - 1j * (np.sin(ph) @ c[lo:hi])
    return out
