"""Field file formats: a CSV variant and a packed binary variant.

CSV layout: one header line ``n,nx,nt,extent,t_min,t_max`` (values), then
nt * nx^n data lines ``t_index,flat_space_index,re,im`` in row-major
order.  Floats are written with repr, so they round-trip at full 64-bit
precision.

Binary layout: header ``<iiBddd`` = (nx, nt, n, extent, t_min, t_max),
then the complex samples row-major as little-endian float64 (re, im)
pairs.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FieldFormatError
from .grid import Grid, GridSpec, SpaceTimeField, make_grid

_HEADER = struct.Struct("<iiBddd")


def _grid_from_header(n, nx, nt, extent, t_min, t_max) -> Grid:
    return make_grid(GridSpec(int(n), float(extent), int(nx), float(t_min), float(t_max), int(nt)))


def write_field_csv(field: SpaceTimeField, path) -> None:
    spec = field.grid.spec
    flat = field.values.reshape(spec.nt, -1)
    with open(path, "w") as fh:
        fh.write(f"{spec.n},{spec.nx},{spec.nt},{spec.extent!r},{spec.t_min!r},{spec.t_max!r}\n")
        for it in range(spec.nt):
            row = flat[it]
            for ij in range(row.shape[0]):
                z = row[ij]
                fh.write(f"{it},{ij},{z.real!r},{z.imag!r}\n")


def read_field_csv(path) -> SpaceTimeField:
    with open(path) as fh:
        header = fh.readline().strip()
        parts = header.split(",")
        if len(parts) != 6:
            raise FieldFormatError(f"expected 6 header fields, got {len(parts)}")
        try:
            n, nx, nt = int(parts[0]), int(parts[1]), int(parts[2])
            extent, t_min, t_max = (float(p) for p in parts[3:])
        except ValueError as exc:
            raise FieldFormatError(f"malformed header {header!r}") from exc
        grid = _grid_from_header(n, nx, nt, extent, t_min, t_max)
        total = nt * nx**n
        flat = np.zeros((nt, nx**n), dtype=np.complex128)
        seen = 0
        for line in fh:
            line = line.strip()
            if not line:
                continue
            cols = line.split(",")
            if len(cols) != 4:
                raise FieldFormatError(f"expected 4 columns, got {line!r}")
            it, ij = int(cols[0]), int(cols[1])
            if not (0 <= it < nt and 0 <= ij < nx**n):
                raise FieldFormatError(f"index out of range in line {line!r}")
            flat[it, ij] = complex(float(cols[2]), float(cols[3]))
            seen += 1
        if seen != total:
            raise FieldFormatError(f"expected {total} data lines, found {seen}")
    return SpaceTimeField(grid, flat.reshape((nt,) + grid.spec.spatial_shape))


def write_field_binary(field: SpaceTimeField, path) -> None:
    spec = field.grid.spec
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(spec.nx, spec.nt, spec.n, spec.extent, spec.t_min, spec.t_max))
        fh.write(np.ascontiguousarray(field.values, dtype="<c16").tobytes())


def read_field_binary(path) -> SpaceTimeField:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FieldFormatError("file too short for the binary header")
    nx, nt, n, extent, t_min, t_max = _HEADER.unpack_from(raw)
    grid = _grid_from_header(n, nx, nt, extent, t_min, t_max)
    total = nt * nx**n
    payload = raw[_HEADER.size :]
    if len(payload) != 16 * total:
        raise FieldFormatError(
            f"expected {16 * total} payload bytes, found {len(payload)}"
        )
    values = np.frombuffer(payload, dtype="<c16").astype(np.complex128)
    return SpaceTimeField(grid, values.reshape((nt,) + grid.spec.spatial_shape))


def save_field(field: SpaceTimeField, path) -> None:
    """Write CSV or binary depending on the file suffix (.csv vs anything else)."""
    if str(path).endswith(".csv"):
        write_field_csv(field, path)
    else:
        write_field_binary(field, path)


def load_field(path) -> SpaceTimeField:
    if str(path).endswith(".csv"):
        return read_field_csv(path)
    return read_field_binary(path)


def write_coefficient_csv(values: np.ndarray, grid: Grid, path) -> None:
    """Store a spatial coefficient field as a single-slice CSV field file."""
    spec = grid.spec
    single = GridSpec(spec.n, spec.extent, spec.nx, spec.t_min, spec.t_max, 2)
    arr = np.zeros((2,) + spec.spatial_shape, dtype=np.complex128)
    arr[0] = values
    write_field_csv(SpaceTimeField(make_grid(single), arr), path)


def read_coefficient_csv(path) -> tuple[np.ndarray, int, float]:
    """Read a coefficient field; returns (values, nx, extent).

    Only the first time slice is meaningful; the file uses the standard
    field format so the same tooling reads both.
    """
    field = read_field_csv(path)
    return np.asarray(field.values[0]), field.grid.spec.nx, field.grid.spec.extent
