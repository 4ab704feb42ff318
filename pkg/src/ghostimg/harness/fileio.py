"""Frame files, CSV tables and run manifests.

Frame file layout (all little-endian)::

    b"GIFR"  u16 version  u32 nx  u32 ny  u32 count
    count * ny * nx float32, row-major, frame after frame
    u64 seed

Frames are stored in single precision; an ensemble read back from disk
round-trips exactly.
"""

import csv
import os
import struct

import numpy as np

from ..errors import MalformedFile, VersionMismatch
from ..speckle import FrameEnsemble

MAGIC = b"GIFR"
VERSION = 1
_HEADER = struct.Struct("<4sHIII")
_FOOTER = struct.Struct("<Q")


def write_frames(ensemble, path):
    stack = np.asarray(ensemble.intensities)
    count, ny, nx = stack.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, nx, ny, count))
        fh.write(np.ascontiguousarray(stack, dtype="<f4").tobytes())
        fh.write(_FOOTER.pack(int(ensemble.seed)))


def read_frames(path):
    """Read a frame file; frame indices are numbered from zero."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise MalformedFile(f"{path}: truncated header at byte offset {len(data)}")
    magic, version, nx, ny, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise MalformedFile(f"{path}: bad magic {magic!r} at byte offset 0")
    if version != VERSION:
        raise VersionMismatch(f"{path}: file version {version}, reader supports {VERSION}")
    body = count * ny * nx * 4
    expected = _HEADER.size + body + _FOOTER.size
    if len(data) < expected:
        raise MalformedFile(f"{path}: truncated at byte offset {len(data)}, "
                            f"expected {expected} bytes")
    if len(data) > expected:
        raise MalformedFile(f"{path}: {len(data) - expected} trailing bytes after offset {expected}")
    stack = np.frombuffer(data, dtype="<f4", count=count * ny * nx, offset=_HEADER.size)
    stack = stack.reshape(count, ny, nx).astype(np.float32)
    (seed,) = _FOOTER.unpack_from(data, _HEADER.size + body)
    return FrameEnsemble(stack, np.arange(count), seed)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_manifest(path, entries, files):
    """Plain-text manifest: ``key: value`` lines, then one ``file:`` line per output."""
    with open(path, "w") as fh:
        for key, value in entries:
            fh.write(f"{key}: {value}\n")
        for f in files:
            fh.write(f"file: {os.path.basename(f)}\n")


def read_manifest(path):
    entries, files = {}, []
    with open(path) as fh:
        for line in fh:
            key, _, value = line.rstrip("\n").partition(": ")
            if key == "file":
                files.append(value)
            else:
                entries[key] = value
    return entries, files
