"""Flat-file formats for trajectories and tables.

CSV columns::

    t,p00,p01,p10,p11,norm2,re_c0,im_c0,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3

Floats are written with 17 significant digits so parsing them back is
bit-exact. Files are UTF-8 with LF line endings.
"""

import csv
import json

import numpy as np

__all__ = [
    "TRAJECTORY_COLUMNS",
    "fmt",
    "trajectory_rows",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_trajectory_json",
    "read_trajectory_json",
    "write_table_csv",
]

TRAJECTORY_COLUMNS = (
    "t", "p00", "p01", "p10", "p11", "norm2",
    "re_c0", "im_c0", "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3",
)


def fmt(x):
    return format(float(x), ".17g")


def trajectory_rows(times, amplitudes):
    pops = np.abs(amplitudes) ** 2
    norm2 = pops.sum(axis=1)
    for t, p, n, c in zip(times, pops, norm2, amplitudes):
        row = [fmt(t), *(fmt(x) for x in p), fmt(n)]
        for z in c:
            row += [fmt(z.real), fmt(z.imag)]
        yield row


def write_table_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_trajectory_csv(path, trajectory):
    write_table_csv(path, TRAJECTORY_COLUMNS,
                    trajectory_rows(trajectory.times, trajectory.amplitudes))


def read_trajectory_csv(path):
    """Return ``(times, amplitudes)`` from a trajectory CSV."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRAJECTORY_COLUMNS:
            raise ValueError(f"unexpected trajectory header: {header}")
        data = np.array([[float(x) for x in row] for row in reader])
    data = data.reshape(-1, len(TRAJECTORY_COLUMNS))
    amps = data[:, 6::2] + 1j * data[:, 7::2]
    return data[:, 0].copy(), amps


def write_trajectory_json(path, trajectory):
    doc = {
        "params": trajectory.params.to_dict(),
        "direction": trajectory.direction.value,
        "config": trajectory.config.to_dict(),
        "max_norm_error": trajectory.max_norm_error,
        "columns": list(TRAJECTORY_COLUMNS),
        "samples": [[float(x) for x in row] for row in trajectory_rows(
            trajectory.times, trajectory.amplitudes)],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_trajectory_json(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    data = np.array(doc["samples"], dtype=float).reshape(-1, len(TRAJECTORY_COLUMNS))
    return data[:, 0].copy(), data[:, 6::2] + 1j * data[:, 7::2]
