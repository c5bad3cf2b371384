"""Pure-numpy reference implementation of the hot evolution kernel.

`collisync.kernels` picks these up whenever the compiled extension is not
available (or is disabled through COLLISYNC_KERNELS=python).
"""

from __future__ import annotations

import numpy as np


def iterate_channel(
    channel: np.ndarray, state: np.ndarray, obs_rows: np.ndarray, n_steps: int
) -> tuple[np.ndarray, np.ndarray]:
    """Apply ``channel`` to ``state`` ``n_steps`` times, recording the real
    part of ``obs_rows @ state`` after every application.

    Returns ``(series, final_state)`` with ``series`` of shape
    ``(n_steps, len(obs_rows))``.
    """
    channel = np.asarray(channel, dtype=complex)
    v = np.asarray(state, dtype=complex).copy()
    obs_rows = np.asarray(obs_rows, dtype=complex)
    if channel.ndim != 2 or channel.shape[0] != channel.shape[1]:
        raise ValueError(f"channel must be square, got shape {channel.shape}")
    if v.shape != (channel.shape[0],) or obs_rows.shape[1:] != v.shape:
        raise ValueError("state/observable dimensions do not match the channel")
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    series = np.empty((n_steps, obs_rows.shape[0]))
    for k in range(n_steps):
        v = channel @ v
        series[k] = (obs_rows @ v).real
    return series, v
