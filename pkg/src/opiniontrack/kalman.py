"""Local-level Kalman filter for daily indicator smoothing.

State model: x_t = x_{t-1} + w_t (variance q), y_t = x_t + v_t
(variance r). r is fixed at 1 so q alone sets the smoothing degree.
Missing observations (nulls and calendar gaps) take predict-only steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from ._accel import NUMBA_ENABLED, njit

INITIAL_VARIANCE = 10.0


@dataclass(frozen=True)
class SmoothingPreset:
    name: str
    q_over_r: float

    def __post_init__(self):
        if self.q_over_r <= 0:
            raise ValueError("q_over_r must be positive")


PRESETS = {
    "reactive": SmoothingPreset("reactive", 1.0),
    "default": SmoothingPreset("default", 0.1),
    "smooth": SmoothingPreset("smooth", 0.01),
}


def local_level_filter_np(y, observed, q, r, x0, p0):
    """Forward filter over a daily grid. y[i] is ignored where
    observed[i] is False (predict-only step). Returns filtered means."""
    n = y.shape[0]
    out = np.empty(n)
    x = x0
    p = p0
    for i in range(n):
        p = p + q
        if observed[i]:
            k = p / (p + r)
            x = x + k * (y[i] - x)
            p = (1.0 - k) * p
        out[i] = x
    return out


local_level_filter_nb = njit(cache=True)(local_level_filter_np)
local_level_filter = local_level_filter_nb if NUMBA_ENABLED else local_level_filter_np


def gain_sequence(q_over_r: float, n_steps: int,
                  p0: float = INITIAL_VARIANCE) -> list[float]:
    """Kalman gain at each update step, starting from the initial variance."""
    q, r = q_over_r, 1.0
    p = p0
    gains = []
    for _ in range(n_steps):
        pp = p + q
        k = pp / (pp + r)
        p = (1.0 - k) * pp
        gains.append(k)
    return gains


def kalman_smooth(series: list[tuple[date, float | None]],
                  preset: SmoothingPreset) -> list[tuple[date, float | None]]:
    """Smooth a daily series. Input dates must be strictly increasing;
    gaps in the calendar are treated as missing observations. Days before
    the first observed value stay null."""
    if not series:
        return []
    dates = [d for d, _ in series]
    for a, b in zip(dates, dates[1:]):
        if b <= a:
            raise ValueError("series dates must be strictly increasing")

    first_obs = next((i for i, (_, v) in enumerate(series) if v is not None), None)
    if first_obs is None:
        return [(d, None) for d, _ in series]

    # expand onto the full daily grid from the first observation onward
    start = dates[first_obs]
    end = dates[-1]
    n_days = (end - start).days + 1
    y = np.zeros(n_days)
    observed = np.zeros(n_days, dtype=np.bool_)
    for d, v in series[first_obs:]:
        if v is not None:
            i = (d - start).days
            y[i] = v
            observed[i] = True

    filtered = local_level_filter(y, observed, preset.q_over_r, 1.0,
                                  y[0], INITIAL_VARIANCE)

    out: list[tuple[date, float | None]] = [(d, None) for d, _ in series[:first_obs]]
    for d, _ in series[first_obs:]:
        out.append((d, float(filtered[(d - start).days])))
    return out
