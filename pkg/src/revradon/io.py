"""Raw ``.f64`` arrays with JSON sidecars.

An array ``name.f64`` holds little-endian float64 values in C order; the
sidecar ``name.json`` records shape, layout, grids and the producing
configuration.  Writes go through a temporary file and ``os.replace`` so
a failed run leaves no partial outputs behind.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .operators.grids import Sinogram, Volume

FORMAT_VERSION = 1
DTYPE = "<f8"
FREQUENCY_CONVENTION = "F(xi) = dz * sum_k f(z_k) exp(-1j xi z_k), xi = 2 pi fftfreq(n, dz)"


def _atomic_write(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_json(obj) -> str:
    """Canonical JSON (sorted keys, fixed indent) for byte-stable files."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_json(path, obj):
    _atomic_write(Path(path), dumps_json(obj).encode())


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _base(path):
    p = Path(path)
    return p.with_suffix("") if p.suffix in (".f64", ".json") else p


def write_array(path, array, meta=None):
    """Write ``array`` to ``<base>.f64`` plus ``<base>.json``; returns both paths."""
    base = _base(path)
    arr = np.ascontiguousarray(np.asarray(array, dtype=DTYPE))
    sidecar = {
        "format_version": FORMAT_VERSION,
        "dtype": "float64",
        "byte_order": "little",
        "order": "C",
        "shape": list(arr.shape),
        "frequency_convention": FREQUENCY_CONVENTION,
    }
    sidecar.update(meta or {})
    raw = base.with_suffix(".f64")
    side = base.with_suffix(".json")
    _atomic_write(raw, arr.tobytes(order="C"))
    write_json(side, sidecar)
    return raw, side


def read_array(path):
    """Read ``<base>.f64`` with its sidecar; returns ``(array, sidecar)``."""
    base = _base(path)
    side = read_json(base.with_suffix(".json"))
    if side.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format version {side.get('format_version')!r}")
    shape = tuple(side["shape"])
    arr = np.fromfile(base.with_suffix(".f64"), dtype=DTYPE)
    if arr.size != int(np.prod(shape)):
        raise ValueError(f"{base.with_suffix('.f64')} holds {arr.size} values, sidecar expects shape {shape}")
    return arr.reshape(shape), side


def save_volume(path, vol: Volume, meta=None):
    m = {"kind": "volume", "extent": list(vol.extent), "support_margin": vol.support_margin}
    m.update(meta or {})
    return write_array(path, vol.values, m)


def load_volume(path) -> tuple[Volume, dict]:
    arr, side = read_array(path)
    if side.get("kind") != "volume":
        raise ValueError("file is not a volume")
    return Volume(arr, tuple(side["extent"]), side.get("support_margin", 0.0)), side


def save_sinogram(path, sino: Sinogram, meta=None):
    m = {
        "kind": "sinogram",
        "s": sino.s.tolist(),
        "theta": sino.theta.tolist(),
        "y3": sino.y3.tolist(),
        "model": sino.meta,
    }
    m.update(meta or {})
    return write_array(path, sino.values, m)


def load_sinogram(path) -> tuple[Sinogram, dict]:
    arr, side = read_array(path)
    if side.get("kind") != "sinogram":
        raise ValueError("file is not a sinogram")
    return Sinogram(arr, side["s"], side["theta"], side["y3"], side.get("model", {})), side
