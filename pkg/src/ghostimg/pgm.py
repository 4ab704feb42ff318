"""Minimal binary PGM (P5) reader and writer."""

import numpy as np

from .errors import MalformedFile


def _tokens(data, count):
    """Read `count` whitespace separated header tokens, skipping comments.

    Returns the tokens and the offset of the single whitespace byte that
    terminates the last one.
    """
    out = []
    pos = 0
    size = len(data)
    while len(out) < count:
        while pos < size and data[pos:pos + 1].isspace():
            pos += 1
        if pos < size and data[pos:pos + 1] == b"#":
            while pos < size and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < size and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise MalformedFile(f"truncated PGM header at byte {pos}")
        out.append(data[start:pos])
    return out, pos


def read_pgm(path):
    """Return the raw gray levels of a P5 file and its maxval."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] != b"P5":
        raise MalformedFile(f"{path}: not a binary PGM (magic {data[:2]!r})")
    tokens, pos = _tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise MalformedFile(f"{path}: bad PGM header {tokens!r}") from exc
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise MalformedFile(f"{path}: bad PGM header values {width}x{height} maxval={maxval}")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise MalformedFile(f"{path}: missing whitespace after PGM header at byte {pos}")
    pos += 1
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    nbytes = width * height * dtype.itemsize
    if len(data) - pos < nbytes:
        raise MalformedFile(
            f"{path}: pixel data truncated at byte {len(data)}, expected {pos + nbytes}")
    gray = np.frombuffer(data, dtype=dtype, count=width * height, offset=pos)
    gray = gray.reshape(height, width)
    if gray.max(initial=0) > maxval:
        raise MalformedFile(f"{path}: gray level exceeds maxval {maxval}")
    return gray.astype(np.int64), maxval


def write_pgm(path, image, maxval=65535):
    """Write values in [0, 1] as a P5 file with the given maxval."""
    image = np.atleast_2d(np.asarray(image, dtype=float))
    if not np.all(np.isfinite(image)):
        raise ValueError("image contains non-finite values")
    levels = np.rint(np.clip(image, 0.0, 1.0) * maxval)
    dtype = ">u2" if maxval > 255 else "u1"
    height, width = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n{maxval}\n".encode("ascii"))
        fh.write(levels.astype(dtype).tobytes())
