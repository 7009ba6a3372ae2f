"""Linear operators for compressive measurement and sparse synthesis.

Everything here is matrix-free: an operator is a pair of callables
(apply, adjoint) plus its dimensions. Dense matrices, subsampled
noiselet transforms and orthonormal wavelet synthesis all share the
same interface so solvers never need to know what they are multiplying
by. Operators are immutable once built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_SQRT2 = math.sqrt(2.0)


def _as_vector(x, dim, name):
    v = np.asarray(x, dtype=np.float64)
    if v.shape != (dim,):
        raise ValueError(f"{name} has shape {v.shape}, expected ({dim},)")
    return v


class LinearOperator:
    """A real linear map R^in_dim -> R^out_dim with explicit adjoint.

    Parameters
    ----------
    in_dim : int
        Domain dimension, at least 1.
    out_dim : int
        Range dimension. Zero is permitted so that degenerate
        measurement-free problems remain expressible.
    apply_fn, adjoint_fn : callables
        Forward and adjoint actions on 1-D float arrays.
    """

    def __init__(self, in_dim, out_dim, apply_fn, adjoint_fn):
        if int(in_dim) != in_dim or in_dim < 1:
            raise ValueError(f"in_dim must be a positive integer, got {in_dim}")
        if int(out_dim) != out_dim or out_dim < 0:
            raise ValueError(f"out_dim must be a non-negative integer, got {out_dim}")
        self.in_dim = int(in_dim)
        self.out_dim = int(out_dim)
        self._apply_fn = apply_fn
        self._adjoint_fn = adjoint_fn

    def apply(self, x):
        x = _as_vector(x, self.in_dim, "input")
        return self._apply_fn(x)

    def adjoint(self, u):
        u = _as_vector(u, self.out_dim, "input")
        return self._adjoint_fn(u)

    def compose(self, inner: "LinearOperator") -> "LinearOperator":
        """Return self @ inner, i.e. x -> self(inner(x))."""
        if not isinstance(inner, LinearOperator):
            raise TypeError("can only compose with another LinearOperator")
        if inner.out_dim != self.in_dim:
            raise ValueError(
                f"dimension mismatch in composition: {self.in_dim} vs {inner.out_dim}"
            )
        if isinstance(inner, IdentityOperator):
            return self
        if isinstance(self, IdentityOperator):
            return inner
        outer = self
        return LinearOperator(
            inner.in_dim,
            outer.out_dim,
            lambda x: outer.apply(inner.apply(x)),
            lambda u: inner.adjoint(outer.adjoint(u)),
        )

    def __matmul__(self, inner):
        return self.compose(inner)

    def materialize(self) -> np.ndarray:
        """Dense (out_dim, in_dim) matrix, built column by column.

        Intended for tests and small problems only.
        """
        cols = np.zeros((self.out_dim, self.in_dim))
        e = np.zeros(self.in_dim)
        for j in range(self.in_dim):
            e[j] = 1.0
            cols[:, j] = self.apply(e)
            e[j] = 0.0
        return cols


class MatrixOperator(LinearOperator):
    """Dense-matrix-backed operator. Exposes .matrix for direct slicing."""

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError("matrix must be 2-D")
        if matrix.shape[1] < 1:
            raise ValueError("matrix must have at least one column")
        self.matrix = matrix
        super().__init__(
            matrix.shape[1],
            matrix.shape[0],
            lambda x: self.matrix @ x,
            lambda u: self.matrix.T @ u,
        )

    def materialize(self):
        return self.matrix.copy()


class IdentityOperator(LinearOperator):
    def __init__(self, n):
        super().__init__(n, n, lambda x: x.copy(), lambda u: u.copy())

    def materialize(self):
        return np.eye(self.in_dim)


class StackedOperator(LinearOperator):
    """Vertical stack [s_0*A_0; s_1*A_1; ...] of operators on a common domain."""

    def __init__(self, ops, scales=None):
        ops = list(ops)
        if not ops:
            raise ValueError("need at least one operator to stack")
        n = ops[0].in_dim
        if any(op.in_dim != n for op in ops):
            raise ValueError("stacked operators must share in_dim")
        if scales is None:
            scales = [1.0] * len(ops)
        scales = [float(s) for s in scales]
        if len(scales) != len(ops):
            raise ValueError("one scale per operator required")
        self._ops = ops
        self._scales = scales
        self._splits = np.cumsum([op.out_dim for op in ops])[:-1]
        super().__init__(
            n,
            int(sum(op.out_dim for op in ops)),
            self._fwd,
            self._adj,
        )

    def _fwd(self, x):
        return np.concatenate([s * op.apply(x) for op, s in zip(self._ops, self._scales)])

    def _adj(self, u):
        parts = np.split(u, self._splits)
        out = np.zeros(self.in_dim)
        for op, s, part in zip(self._ops, self._scales, parts):
            out += s * op.adjoint(part)
        return out


def gaussian_sensing(m, n, rng) -> MatrixOperator:
    """Random dense sensing matrix with i.i.d. normal entries and unit-norm columns.

    Raises ValueError if either dimension is zero.
    """
    if m < 1 or n < 1:
        raise ValueError(f"sensing matrix dimensions must be positive, got {m}x{n}")
    entries = rng.standard_normal((m, n))
    norms = np.linalg.norm(entries, axis=0)
    if np.any(norms == 0.0):
        raise ValueError("degenerate zero column in sensing draw")
    return MatrixOperator(entries / norms)


# ---------------------------------------------------------------------------
# Noiselet transform
# ---------------------------------------------------------------------------
#
# The complex transform follows the butterfly recursion with stage
# coefficients (1-i)/2 and (1+i)/2, base case the scalar 1. Its rows come
# in conjugate pairs (k, n-1-k); keeping one row per pair and stacking
# sqrt(2)*real and sqrt(2)*imag parts yields a real n x n orthonormal
# matrix, which is what `row_subset` indexes into.

_C0 = (1.0 - 1.0j) / 2.0
_C1 = (1.0 + 1.0j) / 2.0


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


def _noiselet_complex(x):
    # O(n log n): row j of the stack holds output positions j mod 2^stage.
    w = np.asarray(x, dtype=np.complex128).reshape(1, -1)
    while w.shape[1] > 1:
        half = w.shape[1] // 2
        left, right = w[:, :half], w[:, half:]
        w = np.vstack((_C0 * left + _C1 * right, _C1 * left + _C0 * right))
    return w.ravel()


def _noiselet_complex_inv(w):
    v = np.asarray(w, dtype=np.complex128).reshape(-1, 1)
    c0, c1 = np.conj(_C0), np.conj(_C1)
    while v.shape[0] > 1:
        g = v.shape[0] // 2
        a, b = v[:g], v[g:]
        v = np.hstack((c0 * a + c1 * b, c1 * a + c0 * b))
    return v.ravel()


def _noiselet_real(x):
    # Full real orthonormal transform; rows 2k, 2k+1 are sqrt(2)*Re / Im
    # of complex row k for k < n/2.
    n = x.size
    if n == 1:
        return x.copy()
    w = _noiselet_complex(x)[: n // 2]
    out = np.empty(n)
    out[0::2] = _SQRT2 * w.real
    out[1::2] = _SQRT2 * w.imag
    return out


def _noiselet_real_t(y):
    n = y.size
    if n == 1:
        return y.copy()
    w = np.zeros(n, dtype=np.complex128)
    w[: n // 2] = y[0::2] + 1j * y[1::2]
    return _SQRT2 * _noiselet_complex_inv(w).real


class NoiseletOperator(LinearOperator):
    """Selected rows of the real orthonormal noiselet transform."""

    def __init__(self, n, row_subset):
        if not _is_pow2(n):
            raise ValueError(f"noiselet length must be a power of two, got {n}")
        rows = np.asarray(row_subset)
        if rows.ndim != 1 or rows.size == 0:
            raise ValueError("row_subset must be a non-empty index list")
        if not np.issubdtype(rows.dtype, np.integer):
            raise ValueError("row_subset must contain integers")
        if rows.min() < 0 or rows.max() >= n:
            raise ValueError(f"row_subset indices must lie in [0, {n})")
        if np.unique(rows).size != rows.size:
            raise ValueError("row_subset contains duplicate indices")
        self.rows = rows.astype(np.intp).copy()
        self.n = n
        super().__init__(n, self.rows.size, self._fwd, self._adj)

    def _fwd(self, x):
        return _noiselet_real(x)[self.rows]

    def _adj(self, u):
        full = np.zeros(self.n)
        full[self.rows] = u
        return _noiselet_real_t(full)


def noiselet_operator(n, row_subset=None, *, num_rows=None, rng=None) -> NoiseletOperator:
    """Subsampled real noiselet measurement operator.

    Pass an explicit `row_subset`, or `num_rows` plus `rng` to draw a
    uniform subset without replacement.
    """
    if row_subset is None:
        if num_rows is None or rng is None:
            raise ValueError("need row_subset, or num_rows and rng")
        row_subset = np.sort(rng.choice(n, size=num_rows, replace=False))
    return NoiseletOperator(n, row_subset)


# ---------------------------------------------------------------------------
# Orthonormal Daubechies wavelet transform, periodic boundary
# ---------------------------------------------------------------------------

_S3 = math.sqrt(3.0)

# Scaling (low-pass) filters, unit l2 norm. Taps 6 and 8 use the standard
# published double-precision values.
_DB_LOWPASS = {
    2: np.array([1.0, 1.0]) / _SQRT2,
    4: np.array([1.0 + _S3, 3.0 + _S3, 3.0 - _S3, 1.0 - _S3]) / (4.0 * _SQRT2),
    6: np.array(
        [
            0.3326705529509569,
            0.8068915093133388,
            0.4598775021193313,
            -0.13501102001039084,
            -0.08544127388224149,
            0.035226291882100656,
        ]
    ),
    8: np.array(
        [
            0.23037781330885523,
            0.7148465705525415,
            0.6308807679295904,
            -0.02798376941698385,
            -0.18703481171888114,
            0.030841381835986965,
            0.032883011666982945,
            -0.010597401784997278,
        ]
    ),
}


def _qmf(h):
    g = h[::-1].copy()
    g[1::2] *= -1.0
    return g


@dataclass(frozen=True)
class WaveletConfig:
    """Transform geometry: filter taps, decomposition depth, signal size.

    size is the 1-D length or the 2-D square side; both must be powers
    of two large enough that every decimation stage sees at least one
    full filter length.
    """

    size: int
    levels: int
    taps: int = 4
    ndim: int = 1

    def __post_init__(self):
        if self.taps not in _DB_LOWPASS:
            raise ValueError(f"unsupported tap count {self.taps}; choose from {sorted(_DB_LOWPASS)}")
        if self.ndim not in (1, 2):
            raise ValueError("ndim must be 1 or 2")
        if not _is_pow2(self.size):
            raise ValueError(f"size must be a power of two, got {self.size}")
        if self.levels < 1:
            raise ValueError("levels must be at least 1")
        smallest = self.size >> (self.levels - 1)
        if smallest < self.taps:
            raise ValueError(
                f"size {self.size} cannot support {self.levels} levels with {self.taps} taps"
            )

    @property
    def total_len(self):
        return self.size**self.ndim


def _analyze(block, h, g):
    # Periodic correlate-and-decimate along the last axis.
    s = block.shape[-1]
    half = s // 2
    pos = 2 * np.arange(half)
    a = np.zeros(block.shape[:-1] + (half,))
    d = np.zeros_like(a)
    for k in range(h.size):
        seg = block[..., (pos + k) % s]
        a += h[k] * seg
        d += g[k] * seg
    return a, d


def _synthesize(a, d, h, g):
    half = a.shape[-1]
    s = 2 * half
    out = np.zeros(a.shape[:-1] + (s,))
    for k in range(h.size):
        j = np.arange(k % 2, s, 2)
        i = ((j - k) % s) // 2
        out[..., j] += h[k] * a[..., i] + g[k] * d[..., i]
    return out


def _analyze2(blk, h, g):
    a, d = _analyze(blk, h, g)
    t = np.concatenate((a, d), axis=-1)
    a2, d2 = _analyze(t.T, h, g)
    return np.concatenate((a2, d2), axis=-1).T


def _synthesize2(blk, h, g):
    half = blk.shape[-1] // 2
    u = blk.T
    t = _synthesize(u[:, :half], u[:, half:], h, g).T
    return _synthesize(t[:, :half], t[:, half:], h, g)


def _check_signal(x, cfg, name):
    x = np.asarray(x, dtype=np.float64)
    want = (cfg.size,) if cfg.ndim == 1 else (cfg.size, cfg.size)
    if x.shape != want:
        raise ValueError(f"{name} has shape {x.shape}, expected {want}")
    return x


def dwt_forward(x, cfg: WaveletConfig):
    """Multilevel analysis transform. Output layout is the usual in-place
    one: approximation block first, then detail bands coarse to fine."""
    out = _check_signal(x, cfg, "signal").copy()
    h = _DB_LOWPASS[cfg.taps]
    g = _qmf(h)
    cur = cfg.size
    for _ in range(cfg.levels):
        if cfg.ndim == 1:
            a, d = _analyze(out[:cur], h, g)
            out[: cur // 2] = a
            out[cur // 2 : cur] = d
        else:
            out[:cur, :cur] = _analyze2(out[:cur, :cur], h, g)
        cur //= 2
    return out

def dwt_inverse(z, cfg: WaveletConfig):
    out = _check_signal(z, cfg, "coefficients").copy()
    h = _DB_LOWPASS[cfg.taps]
    g = _qmf(h)
    cur = cfg.size >> cfg.levels
    for _ in range(cfg.levels):
        s = 2 * cur
        if cfg.ndim == 1:
            out[:s] = _synthesize(out[:cur], out[cur:s], h, g)
        else:
            out[:s, :s] = _synthesize2(out[:s, :s], h, g)
        cur = s
    return out


class WaveletSynthesisOperator(LinearOperator):
    """Coefficients-to-signal map W. Orthonormal, so the adjoint is the
    forward analysis transform. 2-D signals travel as flat C-order vectors."""

    def __init__(self, cfg: WaveletConfig):
        self.cfg = cfg
        n = cfg.total_len
        super().__init__(n, n, self._fwd, self._adj)

    def _shape(self, v):
        return v if self.cfg.ndim == 1 else v.reshape(self.cfg.size, self.cfg.size)

    def _fwd(self, z):
        return dwt_inverse(self._shape(z), self.cfg).ravel()

    def _adj(self, x):
        return dwt_forward(self._shape(x), self.cfg).ravel()


def wavelet_synthesis_operator(cfg: WaveletConfig) -> WaveletSynthesisOperator:
    return WaveletSynthesisOperator(cfg)


@dataclass
class MeasurementFrame:
    """One time step's observation: the sensing operator that produced it,
    the measurement vector, and the noise variance used."""

    op: LinearOperator
    y: np.ndarray
    noise_var: float = 0.0

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.y.shape != (self.op.out_dim,):
            raise ValueError(
                f"measurement length {self.y.shape} does not match operator range ({self.op.out_dim},)"
            )
        if self.noise_var < 0:
            raise ValueError("noise_var must be non-negative")
