"""Arbitrary-length DFTs and circulant matrix products.

The transforms are delegated to :mod:`scipy.fft` (pocketfft), which handles
every length exactly (mixed radix plus Bluestein for large prime factors),
so circular convolutions of length ``N - 1`` need no zero padding.
"""

from __future__ import annotations

import numpy as np
import scipy.fft

from .modular import factorize

__all__ = ["dft", "CirculantOperator", "make_circulant", "circulant_apply"]

# Lengths whose largest prime factor exceeds this use the embedded transform.
EMBED_PRIME = 100

# Imaginary residue allowed after the inverse transform, relative to the
# magnitude scale ``max|base| * sum|v|`` of each output column.
IMAG_TOL = 1e-10


def dft(x, inverse: bool = False, workers: int | None = None) -> np.ndarray:
    """Discrete Fourier transform of a 1-D sequence of any length.

    Forward: ``X[k] = sum_j x[j] exp(-2 pi i jk / m)``. The inverse carries
    the ``1/m`` factor so that ``dft(dft(x), inverse=True) == x``.
    """
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("dft expects a 1-D sequence")
    if x.size == 0:
        raise ValueError("dft of an empty sequence")
    if inverse:
        return scipy.fft.ifft(x, workers=workers)
    return scipy.fft.fft(x, workers=workers)


class CirculantOperator:
    """Circulant matrix ``Z`` with ``Z[i, j] = base[(j - i) mod m]``.

    The first row of ``Z`` is ``base``; each following row is the previous
    one shifted cyclically right by one. Only spectra are stored, so a
    product costs two FFTs.

    Real products (:meth:`apply_rows`) pack two operands into one complex
    transform, which is exact because the kernel is real. They run either
    directly at length ``m`` or, when ``m`` has a prime factor above
    ``EMBED_PRIME`` (slow radix passes), as an exact embedding into a linear
    convolution of fast length ``L >= 2m`` against the base repeated twice.

    Parameters
    ----------
    base : array_like
        Real sequence ``(z_0, ..., z_{m-1})``.
    strategy : {"direct", "embedded"}, optional
        Override the automatic choice for real products.
    """

    def __init__(self, base, strategy: str | None = None):
        base = np.array(base, dtype=float)
        if base.ndim != 1:
            raise ValueError("circulant base must be 1-D")
        if base.size == 0:
            raise ValueError("circulant base is empty")
        base.setflags(write=False)
        self.base = base
        self.m = m = base.size
        # Z is the standard circulant with first column base[-k mod m];
        # the DFT of that column is conj(DFT(base)) for real data.
        spectrum = np.conj(scipy.fft.fft(base))
        spectrum.setflags(write=False)
        self.spectrum = spectrum
        if strategy is None:
            strategy = "embedded" if max(factorize(m), default=1) > EMBED_PRIME else "direct"
        if strategy == "direct":
            self.fft_len = m
            self._offset = 0
            row_spectrum = spectrum
        elif strategy == "embedded":
            self.fft_len = scipy.fft.next_fast_len(2 * m)
            self._offset = m
            column = np.roll(base[::-1], 1)
            row_spectrum = scipy.fft.fft(np.concatenate([column, column]), n=self.fft_len)
            row_spectrum.setflags(write=False)
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        self.strategy = strategy
        self.row_spectrum = row_spectrum
        self._scale = float(np.max(np.abs(base)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.m)

    def apply(self, v, workers: int | None = None) -> np.ndarray:
        """Return ``Z @ v`` for a vector or an ``(m, t)`` matrix."""
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.m or v.ndim > 2:
            raise ValueError(
                f"operand has shape {v.shape}, expected ({self.m},) or ({self.m}, t)"
            )
        if v.ndim == 1:
            out = scipy.fft.ifft(self.spectrum * scipy.fft.fft(v, workers=workers),
                                 workers=workers)
        else:
            vhat = scipy.fft.fft(v, axis=0, workers=workers)
            vhat *= self.spectrum[:, None]
            out = scipy.fft.ifft(vhat, axis=0, overwrite_x=True, workers=workers)
        scale = np.maximum(1.0, self._scale * np.abs(v).sum(axis=0))
        residue = np.max(np.abs(out.imag), axis=0) if out.size else 0.0
        if np.any(residue > IMAG_TOL * scale):
            raise FloatingPointError(
                f"circulant product left imaginary residue {np.max(residue):.3e}"
            )
        return np.ascontiguousarray(out.real)

    __matmul__ = apply

    def apply_rows(self, VT, workers: int | None = None, out=None) -> np.ndarray:
        """Real-input product on row-major data: returns ``(Z @ VT.T).T``.

        ``VT`` has shape ``(t, m)``; each row is one operand. Rows ``i`` and
        ``i + ceil(t/2)`` travel together as the real and imaginary part of
        one complex sequence; since ``Z`` is real the two results separate
        exactly. ``out``, if given, is a ``(t, m)`` destination.
        """
        VT = np.asarray(VT, dtype=float)
        if VT.ndim != 2 or VT.shape[1] != self.m:
            raise ValueError(f"operand rows have shape {VT.shape}, expected (t, {self.m})")
        t, m = VT.shape
        if out is None:
            out = np.empty((t, m))
        elif out.shape != (t, m):
            raise ValueError(f"output has shape {out.shape}, expected ({t}, {m})")
        h = (t + 1) // 2
        packed = np.zeros((h, self.fft_len), dtype=complex)
        packed.real[:, :m] = VT[:h]
        packed.imag[:t - h, :m] = VT[h:]
        packed = scipy.fft.fft(packed, axis=1, overwrite_x=True, workers=workers)
        packed *= self.row_spectrum
        packed = scipy.fft.ifft(packed, axis=1, overwrite_x=True, workers=workers)
        # for the embedded strategy, entries m..2m-1 of the linear
        # convolution with the doubled column are Z v
        lo = self._offset
        out[:h] = packed.real[:, lo:lo + m]
        out[h:] = packed.imag[:t - h, lo:lo + m]
        return out

    def transpose(self) -> "CirculantOperator":
        """The transpose, itself circulant with base ``base[-k mod m]``."""
        return CirculantOperator(np.roll(self.base[::-1], 1), strategy=self.strategy)

    def dense(self) -> np.ndarray:
        """Materialize ``Z`` by direct indexing (for checks, not speed)."""
        idx = (np.arange(self.m)[None, :] - np.arange(self.m)[:, None]) % self.m
        return self.base[idx]


def make_circulant(base, strategy: str | None = None) -> CirculantOperator:
    return CirculantOperator(base, strategy=strategy)


def circulant_apply(op: CirculantOperator, v, workers: int | None = None) -> np.ndarray:
    return op.apply(v, workers=workers)
