"""Plain-text persistence for piecewise-constant pulse tables.

Format: one header row `t,u_x_q1,...`, one row per control interval midpoint,
decimal notation with 12 significant digits. A schedule with no enabled
controls round-trips as a single-column `t` file.
"""

from __future__ import annotations

import numpy as np

from .dynamics import TimeGrid


def save_pulses(path, schedule, grid, labels=None):
    """Write a control schedule to a text table at the grid midpoints."""
    schedule = np.asarray(schedule, dtype=float)
    if schedule.ndim != 2 or schedule.shape[1] != grid.n_steps:
        raise ValueError("schedule shape %s does not match grid with %d steps"
                         % (schedule.shape, grid.n_steps))
    n_controls = schedule.shape[0]
    if labels is None:
        labels = ["u_%d" % (j + 1) for j in range(n_controls)]
    if len(labels) != n_controls:
        raise ValueError("need %d control labels, got %d" % (n_controls, len(labels)))
    with open(path, "w") as fh:
        fh.write(",".join(["t"] + list(labels)) + "\n")
        for k, t in enumerate(grid.midpoints):
            row = [t] + list(schedule[:, k])
            fh.write(",".join("%.12g" % v for v in row) + "\n")


def load_pulses(path, grid):
    """Read a pulse table back; the grid must match the stored midpoints."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("pulse file %s is empty" % path)
    header = lines[0].split(",")
    if header[0] != "t":
        raise ValueError("malformed pulse table: first column must be t")
    labels = header[1:]
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(header):
            raise ValueError("malformed pulse table row: %r" % ln)
        rows.append([float(p) for p in parts])
    data = np.array(rows, dtype=float)
    if data.shape[0] != grid.n_steps:
        raise ValueError("pulse table has %d rows but grid has %d steps"
                         % (data.shape[0], grid.n_steps))
    if not np.allclose(data[:, 0], grid.midpoints, rtol=0, atol=1e-9 * max(1.0, grid.t_final)):
        raise ValueError("pulse table midpoints do not match the grid")
    return data[:, 1:].T.copy(), labels
