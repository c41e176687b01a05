"""Plain-text vectors and 8-bit PGM images for inspecting results."""

from pathlib import Path

import numpy as np

__all__ = ["write_vector_csv", "write_pgm", "read_pgm"]


def write_vector_csv(path, x):
    """One value per line, 17 significant digits (round-trips float64)."""
    np.savetxt(path, np.asarray(x, dtype=np.float64).ravel(), fmt="%.17g")


def write_pgm(path, image):
    """Binary P5 grayscale image of ``|image|`` scaled so the maximum is 255.

    A zero image is written as all black.
    """
    img = np.abs(np.asarray(image, dtype=np.float64))
    if img.ndim != 2:
        raise ValueError(f"expected a 2-d image, got shape {img.shape}")
    peak = img.max(initial=0.0)
    scaled = np.zeros(img.shape) if peak == 0 else img / peak * 255.0
    pixels = np.rint(scaled).astype(np.uint8)
    rows, cols = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_pgm(path):
    """Read a binary P5 file written by :func:`write_pgm`."""
    data = Path(path).read_bytes()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end : end + 1].isspace():
            end += 1
        fields.append(data[pos:end].decode("ascii"))
        pos = end
    if fields[0] != "P5":
        raise ValueError(f"not a binary PGM file: magic {fields[0]!r}")
    cols, rows, maxval = (int(f) for f in fields[1:])
    if maxval > 255:
        raise ValueError("16-bit PGM files are not supported")
    pixels = np.frombuffer(data, dtype=np.uint8, count=rows * cols, offset=pos + 1)
    return pixels.reshape(rows, cols)
