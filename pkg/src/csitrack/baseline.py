"""Linear-regression phase sanitization, the conventional comparison method.

Per packet, the raw CSI phases are unwrapped along the pilot index and a
single least-squares line (slope, intercept) is fitted jointly across all
channels; the fitted line is then removed from every entry.  The fit cannot
separate the true channel phase from the distortion, which is exactly the
weakness the Kalman/MAP estimator addresses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Observation, PilotSet

__all__ = ["RegressionResult", "linreg_sanitize"]


@dataclass(frozen=True)
class RegressionResult:
    slope: float        # radians per subcarrier-index unit
    intercept: float    # radians
    sanitized: np.ndarray  # Q x N, same magnitudes as the input


def linreg_sanitize(obs: Observation, pilots: PilotSet) -> RegressionResult:
    """Fit and remove a common phase line across all channels of one packet."""
    csi = obs.csi
    if csi.shape[0] != pilots.n_pilots:
        raise ValueError("observation does not match the pilot set")
    order = np.argsort(pilots.indices)
    q_sorted = pilots.indices[order].astype(float)

    xs, ys = [], []
    for i in range(csi.shape[1]):
        col = csi[order, i]
        usable = col != 0
        if np.count_nonzero(usable) == 0:
            continue
        phases = np.unwrap(np.angle(col[usable]))
        xs.append(q_sorted[usable])
        ys.append(phases)
    if not xs:
        raise ValueError("no usable pilots for the regression")
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    if np.unique(x).size < 2:
        raise ValueError("fewer than 2 usable pilots; phase line is undetermined")

    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)

    line = intercept + slope * pilots.indices.astype(float)
    sanitized = csi * np.exp(-1j * line)[:, None]
    return RegressionResult(slope=float(slope), intercept=float(intercept),
                            sanitized=sanitized)
