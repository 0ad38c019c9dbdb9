"""Integer hot loops with a numba path and a pure-numpy path.

The numba path is used when numba imports and ``NOBELING_DISABLE_NUMBA`` is
unset (or ``0``).  Both paths return identical arrays; the tests run them
side by side.

Only integer data passes through here.  Exact rational geometry stays in
Python; what lands in these kernels is voxel occupancy and line indices.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = "NOBELING_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAS_NUMBA = numba is not None
USE_NUMBA = HAS_NUMBA and os.environ.get(_FLAG, "").strip() in ("", "0")

# Cantor pairing of two values below this stays inside int64.
PAIR_LIMIT = 2**30


def _strides(shape):
    strides = np.ones(len(shape), dtype=np.int64)
    for ax in range(len(shape) - 2, -1, -1):
        strides[ax] = strides[ax + 1] * shape[ax + 1]
    return strides


# --- union-find labelling of free voxels ------------------------------------


def _uf_labels_numpy(free: np.ndarray) -> np.ndarray:
    """Hook-and-jump union-find.

    Every root hooks under the smaller root across each free face, then
    pointers are jumped to their roots.  Converges to the smallest flat
    index of each component.
    """
    shape = free.shape
    flat = np.ascontiguousarray(free).ravel()
    idx = np.arange(flat.size, dtype=np.int64).reshape(shape)
    us, vs = [], []
    for ax in range(len(shape)):
        lo = [slice(None)] * len(shape)
        hi = [slice(None)] * len(shape)
        lo[ax] = slice(None, -1)
        hi[ax] = slice(1, None)
        both = free[tuple(lo)] & free[tuple(hi)]
        us.append(idx[tuple(lo)][both])
        vs.append(idx[tuple(hi)][both])
    u = np.concatenate(us) if us else np.empty(0, np.int64)
    v = np.concatenate(vs) if vs else np.empty(0, np.int64)

    parent = np.arange(flat.size, dtype=np.int64)
    while True:
        pu, pv = parent[u], parent[v]
        live = pu != pv
        if not live.any():
            break
        np.minimum.at(parent, np.maximum(pu, pv)[live], np.minimum(pu, pv)[live])
        while True:
            jumped = parent[parent]
            if np.array_equal(jumped, parent):
                break
            parent = jumped
    return np.where(flat, parent, -1)


def _uf_labels_loop(flat, shape, strides):
    n = flat.size
    parent = np.arange(n)
    ndim = shape.size
    for i in range(n):
        if not flat[i]:
            continue
        for ax in range(ndim):
            if (i // strides[ax]) % shape[ax] + 1 >= shape[ax]:
                continue
            j = i + strides[ax]
            if not flat[j]:
                continue
            ri = i
            while parent[ri] != ri:
                parent[ri] = parent[parent[ri]]
                ri = parent[ri]
            rj = j
            while parent[rj] != rj:
                parent[rj] = parent[parent[rj]]
                rj = parent[rj]
            if ri < rj:
                parent[rj] = ri
            elif rj < ri:
                parent[ri] = rj
    labels = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        if flat[i]:
            r = i
            while parent[r] != r:
                r = parent[r]
            labels[i] = r
    return labels


if HAS_NUMBA:
    _uf_labels_jit = numba.njit(cache=True)(_uf_labels_loop)
else:  # pragma: no cover
    _uf_labels_jit = None


def _uf_labels_numba(free: np.ndarray) -> np.ndarray:
    flat = np.ascontiguousarray(free).ravel()
    shape = np.asarray(free.shape, dtype=np.int64)
    return _uf_labels_jit(flat, shape, _strides(free.shape))


def uf_labels(free: np.ndarray, use_numba: bool | None = None) -> np.ndarray:
    """Component label per cell (smallest flat index in its component), -1 if not free."""
    free = np.asarray(free, dtype=np.bool_)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        if not HAS_NUMBA:
            raise RuntimeError("numba path requested but numba is not importable")
        return _uf_labels_numba(free)
    return _uf_labels_numpy(free)


def count_components(free: np.ndarray, use_numba: bool | None = None) -> int:
    labels = uf_labels(free, use_numba)
    return int(np.count_nonzero(labels == np.arange(labels.size)))


# --- bulk Cantor pairing ------------------------------------------------------


def _pair_numpy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    s = a + b
    return s * (s + 1) // 2 + b


def _pair_loop(a, b, out):
    for i in range(a.size):
        s = a[i] + b[i]
        out[i] = s * (s + 1) // 2 + b[i]
    return out


if HAS_NUMBA:
    _pair_jit = numba.njit(cache=True)(_pair_loop)
else:  # pragma: no cover
    _pair_jit = None


def pair_array(a, b, use_numba: bool | None = None) -> np.ndarray:
    """Elementwise Cantor pairing of non-negative int64 arrays."""
    a = np.ascontiguousarray(a, dtype=np.int64).ravel()
    b = np.ascontiguousarray(b, dtype=np.int64).ravel()
    if a.shape != b.shape:
        raise ValueError("pairing operands differ in length")
    if a.size and (min(a.min(), b.min()) < 0 or max(a.max(), b.max()) >= PAIR_LIMIT):
        raise OverflowError("bulk pairing only handles values in [0, 2**30)")
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _pair_jit(a, b, np.empty_like(a))
    return _pair_numpy(a, b)


def line_indices(axes, rational_idx, n_dim: int, use_numba: bool | None = None) -> np.ndarray:
    """Vectorized line index for rows of rational indices (one column per fixed axis).

    Mirrors the scalar encoder in :mod:`nobeling.lines`: the columns are
    folded right-to-left by Cantor pairing, then the axis is the low digit
    in radix ``n_dim``.
    """
    cols = np.asarray(rational_idx, dtype=np.int64)
    if cols.ndim != 2 or cols.shape[1] != n_dim - 1:
        raise ValueError("need one column of rational indices per fixed axis")
    t = cols[:, -1]
    for c in range(n_dim - 3, -1, -1):
        t = pair_array(cols[:, c], t, use_numba)
    idx = np.asarray(axes, dtype=np.int64) + n_dim * t
    if idx.size and idx.min() < 0:
        raise OverflowError("line index overflowed int64")
    return idx
