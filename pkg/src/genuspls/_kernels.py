"""Exhaustive face-count search kernels for the genus oracle.

Two interchangeable backends:

``numba``  an odometer over rotation systems compiled with ``@njit``;
           only the darts at the vertex whose digit changed are rewritten.
``numpy``  batches of systems expanded with fancy indexing; cycles are
           counted by pointer doubling (orbit minimum labels).

Set ``GENUSPLS_DISABLE_NUMBA=1`` to force the numpy path.  Both return the
first optimum in the same enumeration order (vertex 0 is the fastest digit,
sign masks ascend inside each rotation system), so results are identical.

Array layout shared by both paths (``D`` darts, ``n`` vertices):

``dart_vertex[d]``   vertex index owning dart ``d``
``dart_local[d]``    position of ``d`` among its vertex's darts
``radix[i]``         number of rotation choices at vertex ``i``
``base[i]``          offset of vertex ``i``'s block in ``succ``/``pred``
``succ``/``pred``    flattened ``[choice, local] -> dart`` tables
Dart ``d`` and ``d ^ 1`` are the two halves of edge ``d >> 1``.
"""
from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    from numba import njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrapper(f):
            return f
        if args and callable(args[0]):
            return args[0]
        return wrapper


def default_backend() -> str:
    if not _HAVE_NUMBA or os.environ.get("GENUSPLS_DISABLE_NUMBA", "").lower() in ("1", "true", "yes"):
        return "numpy"
    return "numba"


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

@njit(cache=True)
def _count_cycles(perm, seen):
    seen[:] = False
    cycles = 0
    for i in range(perm.shape[0]):
        if not seen[i]:
            cycles += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
    return cycles


@njit(cache=True)
def _write_vertex(sigma, sigma_inv, i, c, vdarts, vdeg, vstart, base, succ, pred):
    d_i = vdeg[i]
    off = base[i] + c * d_i
    for p in range(d_i):
        dart = vdarts[vstart[i] + p]
        sigma[dart] = succ[off + p]
        sigma_inv[dart] = pred[off + p]


@njit(cache=True)
def _search_nb(radix, base, succ, pred, vdarts, vdeg, vstart, cotree, signed, limit):
    n = radix.shape[0]
    D = vdarts.shape[0]
    sigma = np.empty(D, np.int64)
    sigma_inv = np.empty(D, np.int64)
    digits = np.zeros(n, np.int64)
    best_digits = np.zeros(n, np.int64)
    best_mask = 0
    best = -1
    for i in range(n):
        _write_vertex(sigma, sigma_inv, i, 0, vdarts, vdeg, vstart, base, succ, pred)
    n_cot = cotree.shape[0]
    perm = np.empty(2 * D if signed else D, np.int64)
    seen = np.empty(perm.shape[0], np.bool_)
    lam = np.ones(D // 2, np.int64)
    searched = 0
    while True:
        if not signed:
            for d in range(D):
                perm[d] = sigma[d ^ 1]
            f = _count_cycles(perm, seen)
            searched += 1
            if f > best:
                best = f
                best_digits[:] = digits
            if best >= limit:
                break
        else:
            for mask in range(1, 1 << n_cot):
                for k in range(n_cot):
                    lam[cotree[k]] = -1 if (mask >> k) & 1 else 1
                # state 2*d (+1 direction) / 2*d+1 (-1 direction)
                for d in range(D):
                    a = d ^ 1
                    l = lam[d >> 1]
                    perm[2 * d] = 2 * (sigma[a] if l == 1 else sigma_inv[a]) + (0 if l == 1 else 1)
                    perm[2 * d + 1] = 2 * (sigma_inv[a] if l == 1 else sigma[a]) + (1 if l == 1 else 0)
                f = _count_cycles(perm, seen) // 2
                searched += 1
                if f > best:
                    best = f
                    best_digits[:] = digits
                    best_mask = mask
            if best >= limit:
                break
        # odometer
        i = 0
        while i < n:
            digits[i] += 1
            if digits[i] < radix[i]:
                _write_vertex(sigma, sigma_inv, i, digits[i], vdarts, vdeg, vstart, base, succ, pred)
                break
            digits[i] = 0
            _write_vertex(sigma, sigma_inv, i, 0, vdarts, vdeg, vstart, base, succ, pred)
            i += 1
        if i == n:
            break
    return best, best_digits, best_mask, searched


# ---------------------------------------------------------------------------
# numpy path
# ---------------------------------------------------------------------------

def count_cycles_batch(perms: np.ndarray) -> np.ndarray:
    """Number of cycles of each row of a ``(B, N)`` permutation array."""
    B, N = perms.shape
    labels = np.broadcast_to(np.arange(N), (B, N)).copy()
    p = perms.copy()
    span = 1
    while span < N:
        labels = np.minimum(labels, np.take_along_axis(labels, p, axis=1))
        p = np.take_along_axis(p, p, axis=1)
        span *= 2
    return (labels == np.arange(N)).sum(axis=1)


def _search_np(radix, base, succ, pred, dart_vertex, dart_local, vdeg, cotree, signed, limit, batch):
    D = dart_vertex.shape[0]
    total = int(np.prod(radix, dtype=np.int64))
    strides = np.concatenate(([1], np.cumprod(radix)[:-1])).astype(np.int64)
    alpha = np.arange(D) ^ 1
    n_cot = cotree.shape[0]
    masks = np.arange(1, 1 << n_cot, dtype=np.int64) if signed else None
    if signed:
        lam = np.ones((masks.shape[0], D // 2), np.int64)
        for k in range(n_cot):
            lam[:, cotree[k]] = np.where((masks >> k) & 1, -1, 1)
        lam_d = lam[:, np.arange(D) >> 1]  # sign seen from each dart, per mask
        rows = max(1, batch // masks.shape[0])
    else:
        rows = batch
    best, best_flat, best_mask, searched = -1, 0, 0, 0
    start = 0
    while start < total:
        idx = np.arange(start, min(total, start + rows), dtype=np.int64)
        digits = (idx[:, None] // strides[None, :]) % radix[None, :]
        pos = base[dart_vertex][None, :] + digits[:, dart_vertex] * vdeg[dart_vertex][None, :] + dart_local[None, :]
        sigma = succ[pos]
        if not signed:
            faces = count_cycles_batch(sigma[:, alpha])
            searched += idx.shape[0]
            k = int(np.argmax(faces))
            if faces[k] > best:
                best, best_flat = int(faces[k]), int(idx[k])
        else:
            sigma_inv = pred[pos]
            fwd = sigma[:, alpha]
            bwd = sigma_inv[:, alpha]
            S = masks.shape[0]
            R = idx.shape[0]
            l = np.broadcast_to(lam_d[None, :, :], (R, S, D))
            f3 = np.broadcast_to(fwd[:, None, :], (R, S, D))
            b3 = np.broadcast_to(bwd[:, None, :], (R, S, D))
            plus = np.where(l == 1, 2 * f3, 2 * b3 + 1)
            minus = np.where(l == 1, 2 * b3 + 1, 2 * f3)
            states = np.empty((R, S, 2 * D), np.int64)
            states[:, :, 0::2] = plus
            states[:, :, 1::2] = minus
            faces = count_cycles_batch(states.reshape(R * S, 2 * D)) // 2
            searched += R * S
            k = int(np.argmax(faces))
            if faces[k] > best:
                best, best_flat, best_mask = int(faces[k]), int(idx[k // S]), int(masks[k % S])
        if best >= limit:
            break
        start += idx.shape[0]
    digits = (best_flat // strides) % radix
    return best, digits, best_mask, searched


def search_max_faces(tables: dict, signed: bool, limit: int, backend: str | None = None,
                     batch: int = 1 << 15):
    """Maximise the face count over every system described by ``tables``.

    Returns ``(faces, digits, sign_mask, systems_searched)``.  The search
    stops early once ``limit`` faces are reached.
    """
    backend = backend or default_backend()
    if backend == "numba":
        best, digits, mask, searched = _search_nb(
            tables["radix"], tables["base"], tables["succ"], tables["pred"], tables["vdarts"],
            tables["vdeg"], tables["vstart"], tables["cotree"], signed, limit)
    elif backend == "numpy":
        best, digits, mask, searched = _search_np(
            tables["radix"], tables["base"], tables["succ"], tables["pred"], tables["dart_vertex"],
            tables["dart_local"], tables["vdeg"], tables["cotree"], signed, limit, batch)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return int(best), [int(x) for x in digits], int(mask), int(searched)
