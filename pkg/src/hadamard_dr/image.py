"""Manifold-valued images and their on-disk formats.

``.mimg`` layout (all little-endian):

    16 bytes   magic b"HADAMARD-MIMG\\x00\\x01\\x00"
    4 bytes    uint32 length L of the JSON header
    L bytes    UTF-8 JSON: {"kind", "rows", "cols", "ambient_dim", "mask"}
    8*N*M*A    float64 coordinates, row-major, A = ambient_dim per pixel
    ceil(N*M/8) mask bits (only when "mask" is true), numpy packbits with
               little bit order, row-major pixel order

Scalar fields are exported as binary PGM (P5, 8 bit) with a JSON sidecar
``<file>.json`` recording {"min", "max", "channel"} of the min-max scaling.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .manifolds import Backend, ManifoldError, backend_from_ambient, get_backend

MAGIC = b"HADAMARD-MIMG\x00\x01\x00"
assert len(MAGIC) == 16


@dataclass
class ManifoldImage:
    """N x M grid of points in native coordinates plus a known-pixel mask.

    ``data`` has shape (rows, cols) + native point shape. ``mask`` is True
    where data is present; ``None`` means every pixel is known.
    """

    kind: str
    data: np.ndarray
    mask: np.ndarray | None = None
    dim: int | None = None
    backend: Backend = field(init=False, repr=False)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim < 2 or self.data.shape[0] == 0 or self.data.shape[1] == 0:
            raise ManifoldError("image grid must be nonempty")
        if self.dim is None:
            amb = int(np.prod(self.data.shape[2:])) if self.data.ndim > 2 else 1
            self.backend = backend_from_ambient(self.kind, amb)
        else:
            self.backend = get_backend(self.kind, self.dim)
        want = self.shape + self.backend.native_shape
        if self.data.shape != want:
            if self.data.size != np.prod(want):
                raise ManifoldError(f"data shape {self.data.shape} does not fit {self.kind}")
            self.data = self.data.reshape(want)
        if self.mask is not None:
            self.mask = np.asarray(self.mask, dtype=bool).reshape(self.shape)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.data.shape[0], self.data.shape[1])

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def known(self) -> np.ndarray:
        return np.ones(self.shape, bool) if self.mask is None else self.mask

    @property
    def manifold(self):
        return self.backend.manifold

    def validate(self, tol: float = 1e-9) -> None:
        self.backend.check_native(self.data[self.known], tol)

    def working(self) -> np.ndarray:
        """Pixel values on the solver manifold, shape (rows, cols) + point_shape."""
        return self.backend.to_working(self.data)

    @classmethod
    def from_working(cls, kind, values, mask=None, dim=None) -> "ManifoldImage":
        b = get_backend(kind, dim)
        return cls(kind, b.from_working(values), mask, dim)

    def copy(self, data=None, mask="keep") -> "ManifoldImage":
        m = self.mask if isinstance(mask, str) else mask
        return ManifoldImage(
            self.kind,
            self.data.copy() if data is None else data,
            None if m is None else np.array(m, dtype=bool),
            self.dim,
        )


def write_mimg(image: ManifoldImage, path) -> None:
    amb = image.backend.descriptor.ambient_dim
    header = {
        "kind": image.kind,
        "rows": image.rows,
        "cols": image.cols,
        "ambient_dim": amb,
        "mask": image.mask is not None,
    }
    hb = json.dumps(header, sort_keys=True).encode("utf-8")
    coords = np.ascontiguousarray(image.data, dtype="<f8").reshape(-1)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(hb)))
        fh.write(hb)
        fh.write(coords.tobytes())
        if image.mask is not None:
            fh.write(np.packbits(image.mask.reshape(-1), bitorder="little").tobytes())


def read_mimg(path) -> ManifoldImage:
    raw = Path(path).read_bytes()
    if raw[:16] != MAGIC:
        raise ManifoldError(f"{path}: not a .mimg file")
    (hlen,) = struct.unpack("<I", raw[16:20])
    header = json.loads(raw[20 : 20 + hlen].decode("utf-8"))
    n, m, amb = header["rows"], header["cols"], header["ambient_dim"]
    start = 20 + hlen
    count = n * m * amb
    end = start + 8 * count
    if len(raw) < end:
        raise ManifoldError(f"{path}: truncated coordinate block")
    coords = np.frombuffer(raw[start:end], dtype="<f8").astype(float)
    mask = None
    if header["mask"]:
        nbytes = (n * m + 7) // 8
        bits = np.frombuffer(raw[end : end + nbytes], dtype=np.uint8)
        if len(bits) != nbytes:
            raise ManifoldError(f"{path}: truncated mask block")
        mask = np.unpackbits(bits, count=n * m, bitorder="little").astype(bool).reshape(n, m)
    backend = backend_from_ambient(header["kind"], amb)
    data = coords.reshape((n, m) + backend.native_shape)
    dim = _dim_from_ambient(header["kind"], amb)
    return ManifoldImage(header["kind"], data, mask, dim)


def _dim_from_ambient(kind, amb):
    if kind == "euclidean":
        return amb
    if kind == "hyperbolic":
        return amb - 1
    if kind == "spd":
        return int(round(amb**0.5))
    return None


# ---------------------------------------------------------------------------
# scalar rasters


def write_pgm(values, path, channel: str = "value") -> dict:
    """Min-max scale a 2-D field to 8 bit and write PGM plus JSON sidecar."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 2:
        raise ValueError("expected a 2-D field")
    lo, hi = float(np.min(v)), float(np.max(v))
    if hi > lo:
        pix = np.rint((v - lo) / (hi - lo) * 255.0).astype(np.uint8)
    else:
        pix = np.zeros(v.shape, np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{v.shape[1]} {v.shape[0]}\n255\n".encode("ascii"))
        fh.write(pix.tobytes())
    meta = {"min": lo, "max": hi, "channel": channel}
    Path(str(path) + ".json").write_text(json.dumps(meta))
    return meta


def read_pgm(path) -> np.ndarray:
    """Read a binary (P5) or ASCII (P2) PGM as a float array."""
    raw = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            while raw[pos : pos + 1] not in (b"\n", b""):
                pos += 1
            continue
        start = pos
        while not raw[pos : pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos])
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic == b"P5":
        dtype = np.uint8 if maxval < 256 else ">u2"
        body = raw[pos + 1 :]
        return np.frombuffer(body, dtype=dtype, count=w * h).reshape(h, w).astype(float)
    if magic == b"P2":
        return np.array(raw[pos:].split(), dtype=float)[: w * h].reshape(h, w)
    raise ValueError(f"{path}: unsupported PGM variant {magic!r}")
