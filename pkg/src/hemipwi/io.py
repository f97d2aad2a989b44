"""File formats: binary pixmaps, density grids, histogram triplets, sidecars."""

import csv
import json
import platform

import numpy as np

from . import __version__

GRID_DTYPE = np.dtype([("pixel", "<i4"), ("n1", "<i8"), ("n2", "<i8"), ("valid", "u1")])


def write_ppm(path, rgb):
    """Write an ``(H, W, 3)`` uint8 array as a binary P6 pixmap."""
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("expected an (H, W, 3) array")
    h, w, _ = rgb.shape
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(rgb.tobytes())


def read_ppm(path):
    with open(path, "rb") as f:
        data = f.read()
    fields = []
    pos = 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    if fields[0] != b"P6":
        raise ValueError("not a binary P6 pixmap")
    w, h, maxval = (int(v) for v in fields[1:])
    if maxval != 255:
        raise ValueError("only 8-bit pixmaps are supported")
    pos += 1
    return np.frombuffer(data[pos:pos + 3 * w * h], dtype=np.uint8).reshape(h, w, 3).copy()


def write_grid(path, grid):
    """Flat little-endian records ``(pixel, n1, n2, valid)`` in row-major pixel order."""
    rec = np.empty(grid.n1.size, dtype=GRID_DTYPE)
    rec["pixel"] = np.arange(grid.n1.size)
    rec["n1"] = grid.n1.ravel()
    rec["n2"] = grid.n2.ravel()
    rec["valid"] = grid.valid.ravel()
    rec.tofile(path)


def read_grid(path, resolution):
    rec = np.fromfile(path, dtype=GRID_DTYPE)
    if rec.size != resolution * resolution:
        raise ValueError(f"{path}: {rec.size} records, expected {resolution ** 2}")
    shape = (resolution, resolution)
    return rec["n1"].reshape(shape), rec["n2"].reshape(shape), rec["valid"].reshape(shape).astype(bool)


def write_histogram_csv(path, counts):
    """Sparse ``i,j,count`` triplets of the nonzero cells, row-major."""
    ii, jj = np.nonzero(counts)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["i", "j", "count"])
        for i, j in zip(ii, jj):
            w.writerow([int(i), int(j), int(counts[i, j])])


def read_histogram_csv(path, n_bins):
    counts = np.zeros((n_bins, n_bins), dtype=np.int64)
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            counts[int(row["i"]), int(row["j"])] = int(row["count"])
    return counts


def write_sidecar(path, command, config, results=None, outputs=None):
    doc = {
        "command": command,
        "config": config,
        "results": results or {},
        "outputs": outputs or {},
        "code_version": __version__,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True, default=_jsonable)
        f.write("\n")
    return doc


def read_sidecar(path):
    with open(path) as f:
        return json.load(f)


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")
