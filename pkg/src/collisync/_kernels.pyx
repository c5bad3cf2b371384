# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled evolution kernel; mirrors collisync._kernels_py exactly.

The per-step matrix-vector product goes straight to BLAS zgemv and the
observable traces run as plain C loops, so iterating thousands of steps
carries no per-step interpreter overhead.
"""

import numpy as np

from scipy.linalg.cython_blas cimport zgemv


def iterate_channel(channel, state, obs_rows, Py_ssize_t n_steps):
    """Apply ``channel`` to ``state`` ``n_steps`` times, recording the real
    part of ``obs_rows @ state`` after every application.

    Returns ``(series, final_state)`` with ``series`` of shape
    ``(n_steps, len(obs_rows))``.
    """
    channel_arr = np.ascontiguousarray(channel, dtype=np.complex128)
    state_arr = np.ascontiguousarray(state, dtype=np.complex128)
    obs_arr = np.ascontiguousarray(obs_rows, dtype=np.complex128)
    if channel_arr.ndim != 2 or channel_arr.shape[0] != channel_arr.shape[1]:
        raise ValueError(f"channel must be square, got shape {channel_arr.shape}")
    if state_arr.shape != (channel_arr.shape[0],) or obs_arr.shape[1:] != state_arr.shape:
        raise ValueError("state/observable dimensions do not match the channel")
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")

    cdef double complex[:, ::1] a = channel_arr
    cdef double complex[:, ::1] obs = obs_arr
    cdef int d = a.shape[0]
    cdef Py_ssize_t n_obs = obs.shape[0]

    series_arr = np.empty((n_steps, n_obs), dtype=np.float64)
    cur_arr = state_arr.copy()
    nxt_arr = np.empty(d, dtype=np.complex128)
    cdef double[:, ::1] series = series_arr
    cdef double complex[::1] cur_mv = cur_arr
    cdef double complex[::1] nxt_mv = nxt_arr

    cdef double complex* cur = &cur_mv[0]
    cdef double complex* nxt = &nxt_mv[0]
    cdef double complex* swap
    cdef double complex alpha = 1.0
    cdef double complex beta = 0.0
    cdef double complex acc
    cdef char trans = b'T'
    cdef int inc = 1
    cdef Py_ssize_t k, j, i

    for k in range(n_steps):
        # the row-major channel seen column-major is its transpose, so 'T'
        # makes zgemv compute channel @ cur
        zgemv(&trans, &d, &d, &alpha, &a[0, 0], &d, cur, &inc, &beta, nxt, &inc)
        swap = cur
        cur = nxt
        nxt = swap
        for j in range(n_obs):
            acc = 0
            for i in range(d):
                acc = acc + obs[j, i] * cur[i]
            series[k, j] = acc.real

    out = np.empty(d, dtype=np.complex128)
    cdef double complex[::1] out_mv = out
    for i in range(d):
        out_mv[i] = cur[i]
    return series_arr, out
