"""Binary cache files for tables.

Layout (all fields little-endian, 8 bytes unless noted)::

    magic      8 bytes  b"FRIABLE\\0"
    version    int64
    kind       int64    1 = rho table, 2 = factor tables, 3 = prime list
    n_meta     int64
    meta       n_meta x 8 bytes (float64 for rho tables, int64 otherwise)
    n_arrays   int64
    per array: dtype code int64 (1 = <f8, 2 = <i4, 3 = <i8), length int64
    array data, concatenated in the order declared

A reader that finds a different magic, version, kind or metadata raises
``StaleCache``; callers rebuild and overwrite.
"""
from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

from .sieves import FactorTables
from .special_functions import RhoTable

MAGIC = b"FRIABLE\0"
VERSION = 1
KIND_RHO, KIND_FACTORS, KIND_PRIMES = 1, 2, 3
_DTYPES = {1: "<f8", 2: "<i4", 3: "<i8"}
_CODES = {v: k for k, v in _DTYPES.items()}

CACHE_ENV = "FRIABLE_CACHE_DIR"


class StaleCache(Exception):
    """The file is missing, corrupt, or was written for different parameters."""


def write(path, kind, meta, arrays, meta_format="<d"):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<qqq", VERSION, kind, len(meta)))
        for value in meta:
            fh.write(struct.pack(meta_format, value))
        fh.write(struct.pack("<q", len(arrays)))
        converted = []
        for arr in arrays:
            arr = np.ascontiguousarray(arr, dtype=np.dtype(arr.dtype).newbyteorder("<"))
            code = _CODES[arr.dtype.str]
            fh.write(struct.pack("<qq", code, len(arr)))
            converted.append(arr)
        for arr in converted:
            fh.write(arr.tobytes())
    os.replace(tmp, path)


def read(path, kind, meta_format="<d"):
    try:
        with open(path, "rb") as fh:
            if fh.read(8) != MAGIC:
                raise StaleCache(f"{path}: bad magic")
            version, got_kind, n_meta = struct.unpack("<qqq", fh.read(24))
            if version != VERSION or got_kind != kind:
                raise StaleCache(f"{path}: version {version}, kind {got_kind}")
            meta = [struct.unpack(meta_format, fh.read(8))[0] for _ in range(n_meta)]
            (n_arrays,) = struct.unpack("<q", fh.read(8))
            specs = [struct.unpack("<qq", fh.read(16)) for _ in range(n_arrays)]
            arrays = []
            for code, length in specs:
                dtype = np.dtype(_DTYPES[code])
                arr = np.fromfile(fh, dtype=dtype, count=length)
                if len(arr) != length:
                    raise StaleCache(f"{path}: truncated")
                arrays.append(arr.astype(dtype.newbyteorder("="), copy=False))
    except (OSError, struct.error, KeyError) as exc:
        raise StaleCache(f"{path}: {exc}") from exc
    return meta, arrays


def save_rho_table(path, table: RhoTable):
    write(path, KIND_RHO,
          [table.grid_step, table.max_v, float(table.interpolation_order)],
          [table.log_values])


def load_rho_table(path, grid_step=None, max_v=None) -> RhoTable:
    (step, max_v_got, order), (logs,) = read(path, KIND_RHO)
    if grid_step is not None and step != grid_step:
        raise StaleCache(f"{path}: grid_step {step} != {grid_step}")
    if max_v is not None and max_v_got != max_v:
        raise StaleCache(f"{path}: max_v {max_v_got} != {max_v}")
    return RhoTable(grid_step=step, max_v=max_v_got, log_values=logs,
                    interpolation_order=int(order))


def save_factor_tables(path, tables: FactorTables):
    write(path, KIND_FACTORS, [tables.limit], [tables.lpf, tables.radical], "<q")


def load_factor_tables(path, limit=None) -> FactorTables:
    (got,), (lpf, rad) = read(path, KIND_FACTORS, "<q")
    if limit is not None and got != limit:
        raise StaleCache(f"{path}: limit {got} != {limit}")
    if len(lpf) != got + 1 or len(rad) != got + 1:
        raise StaleCache(f"{path}: array length mismatch")
    return FactorTables(limit=got, lpf=lpf, radical=rad)


def save_primes(path, limit, primes):
    write(path, KIND_PRIMES, [limit], [np.asarray(primes, dtype=np.int64)], "<q")


def load_primes(path, limit=None):
    (got,), (primes,) = read(path, KIND_PRIMES, "<q")
    if limit is not None and got != limit:
        raise StaleCache(f"{path}: limit {got} != {limit}")
    return got, primes


def cache_path(cache_dir, kind, limit, grid_step=None):
    """One file per (kind, limit, grid_step)."""
    name = f"{kind}-{limit:g}" if isinstance(limit, float) else f"{kind}-{limit}"
    if grid_step is not None:
        name += f"-h{round(1 / grid_step)}"
    return Path(cache_dir) / f"{name}.bin"


def cached(cache_dir, kind, limit, build, load, save, grid_step=None):
    """Load from ``cache_dir`` if present and current, else build and store."""
    if cache_dir is None:
        return build()
    path = cache_path(cache_dir, kind, limit, grid_step)
    try:
        return load(path)
    except StaleCache:
        obj = build()
        save(path, obj)
        return obj
