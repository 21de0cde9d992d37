"""Minimal PNG and PPM/PGM codecs.

Supported formats:
  - PNG: 8-bit grayscale (color type 0) or RGB (color type 2),
    non-interlaced, any standard row filter on decode; encode uses
    filter 0 rows.
  - PPM binary (P6, RGB) and PGM binary (P5, grayscale), maxval 255.

Intensities decode to source byte / 255 and encode as
round-half-up(v * 255) clamped to [0, 255], so a decode/encode round trip
moves each channel by at most 1/255.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .image import check_image

__all__ = [
    "DecodeError",
    "MalformedHeaderError",
    "UnsupportedFormatError",
    "TruncatedDataError",
    "decode_image",
    "encode_image",
    "read_image",
    "write_image",
]

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


class DecodeError(ValueError):
    """Base class for image decode failures."""


class MalformedHeaderError(DecodeError):
    """Header bytes do not form a valid PNG/PPM/PGM header."""


class UnsupportedFormatError(DecodeError):
    """Well-formed input using a feature outside the supported subset."""


class TruncatedDataError(DecodeError):
    """Input ends before the declared payload is complete."""


def decode_image(data: bytes, fmt: str | None = None) -> np.ndarray:
    """Decode PNG or binary PPM/PGM bytes into a float image in [0, 1].

    `fmt` may be 'png' or 'ppm' to require a specific container; by
    default the format is sniffed from the signature bytes.
    """
    if fmt not in (None, "png", "ppm"):
        raise ValueError(f"unknown format {fmt!r}")
    is_png = data[:8] == PNG_SIGNATURE
    if fmt == "png" and not is_png:
        raise MalformedHeaderError("missing PNG signature")
    if fmt == "ppm" or (fmt is None and not is_png):
        return _decode_pnm(data)
    return _decode_png(data)


def encode_image(img, fmt: str = "png") -> bytes:
    """Encode a float image in [0, 1] as PNG or binary PPM/PGM bytes."""
    arr = check_image(img)
    quantized = _quantize(arr)
    if fmt == "png":
        return _encode_png(quantized)
    if fmt == "ppm":
        return _encode_pnm(quantized)
    raise ValueError(f"unknown format {fmt!r}")


def read_image(path) -> np.ndarray:
    return decode_image(Path(path).read_bytes())


def write_image(path, img) -> None:
    path = Path(path)
    fmt = "ppm" if path.suffix.lower() in (".ppm", ".pgm") else "png"
    path.write_bytes(encode_image(img, fmt))


def _quantize(arr: np.ndarray) -> np.ndarray:
    # round half up so 0.5 -> 128, matching the documented rule
    return np.clip(np.floor(arr * 255.0 + 0.5), 0, 255).astype(np.uint8)


# --- PPM / PGM ---


def _decode_pnm(data: bytes) -> np.ndarray:
    if len(data) < 2 or data[:1] != b"P" or data[1:2] not in (b"5", b"6"):
        raise MalformedHeaderError("not a binary PGM (P5) or PPM (P6) file")
    channels = 1 if data[1:2] == b"5" else 3

    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise MalformedHeaderError("PNM header ended prematurely")
        token = data[start:pos]
        if not token.isdigit():
            raise MalformedHeaderError(f"bad PNM header token {token!r}")
        fields.append(int(token))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"bad PNM dimensions {width}x{height}")
    if maxval > 255:
        raise UnsupportedFormatError(f"PNM maxval {maxval} exceeds 8-bit range")
    if maxval < 1:
        raise MalformedHeaderError(f"bad PNM maxval {maxval}")
    pos += 1  # single whitespace after maxval

    expected = width * height * channels
    payload = data[pos : pos + expected]
    if len(payload) < expected:
        raise TruncatedDataError(
            f"PNM payload has {len(payload)} bytes, expected {expected}"
        )
    arr = np.frombuffer(payload, dtype=np.uint8).astype(float) / float(maxval)
    shape = (height, width) if channels == 1 else (height, width, 3)
    return arr.reshape(shape)


def _encode_pnm(quantized: np.ndarray) -> bytes:
    h, w = quantized.shape[:2]
    magic = b"P5" if quantized.ndim == 2 else b"P6"
    header = magic + f"\n{w} {h}\n255\n".encode("ascii")
    return header + quantized.tobytes()


# --- PNG ---


def _decode_png(data: bytes) -> np.ndarray:
    if data[:8] != PNG_SIGNATURE:
        raise MalformedHeaderError("missing PNG signature")
    pos = 8
    ihdr = None
    idat = bytearray()
    seen_iend = False
    while pos < len(data):
        if pos + 8 > len(data):
            raise TruncatedDataError("PNG chunk header truncated")
        length, ctype = struct.unpack(">I4s", data[pos : pos + 8])
        pos += 8
        if pos + length + 4 > len(data):
            raise TruncatedDataError(f"PNG chunk {ctype!r} payload truncated")
        payload = data[pos : pos + length]
        pos += length
        (crc,) = struct.unpack(">I", data[pos : pos + 4])
        pos += 4
        if zlib.crc32(ctype + payload) & 0xFFFFFFFF != crc:
            raise MalformedHeaderError(f"PNG chunk {ctype!r} CRC mismatch")
        if ctype == b"IHDR":
            ihdr = payload
        elif ctype == b"IDAT":
            idat.extend(payload)
        elif ctype == b"IEND":
            seen_iend = True
            break
    if ihdr is None:
        raise MalformedHeaderError("PNG has no IHDR chunk")
    if len(ihdr) != 13:
        raise MalformedHeaderError("PNG IHDR has wrong length")
    width, height, depth, color, compression, filter_method, interlace = struct.unpack(
        ">IIBBBBB", ihdr
    )
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"bad PNG dimensions {width}x{height}")
    if depth != 8:
        raise UnsupportedFormatError(f"unsupported PNG bit depth {depth} (only 8)")
    if color not in (0, 2):
        raise UnsupportedFormatError(f"unsupported PNG color type {color}")
    if compression != 0 or filter_method != 0:
        raise UnsupportedFormatError("unsupported PNG compression/filter method")
    if interlace != 0:
        raise UnsupportedFormatError("interlaced PNG is not supported")
    if not seen_iend:
        raise TruncatedDataError("PNG ended before IEND chunk")
    if not idat:
        raise TruncatedDataError("PNG has no IDAT data")

    channels = 1 if color == 0 else 3
    try:
        raw = zlib.decompress(bytes(idat))
    except zlib.error as exc:
        raise TruncatedDataError(f"PNG IDAT stream is corrupt: {exc}") from exc
    stride = width * channels
    if len(raw) != (stride + 1) * height:
        raise TruncatedDataError(
            f"PNG pixel data has {len(raw)} bytes, expected {(stride + 1) * height}"
        )

    out = np.empty((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    for y in range(height):
        ftype = raw[y * (stride + 1)]
        line = np.frombuffer(
            raw, dtype=np.uint8, count=stride, offset=y * (stride + 1) + 1
        ).copy()
        out[y] = _unfilter_row(line, prev, ftype, channels)
        prev = out[y]
    arr = out.astype(float) / 255.0
    if channels == 1:
        return arr.reshape(height, width)
    return arr.reshape(height, width, 3)


def _unfilter_row(line: np.ndarray, prev: np.ndarray, ftype: int, channels: int) -> np.ndarray:
    if ftype == 0:
        return line
    if ftype == 2:
        return (line.astype(np.uint16) + prev).astype(np.uint8)
    # Sub/Average/Paeth need the reconstructed left neighbour, so go scalar.
    res = np.zeros_like(line)
    for x in range(len(line)):
        a = int(res[x - channels]) if x >= channels else 0
        b = int(prev[x])
        c = int(prev[x - channels]) if x >= channels else 0
        v = int(line[x])
        if ftype == 1:
            res[x] = (v + a) & 0xFF
        elif ftype == 3:
            res[x] = (v + (a + b) // 2) & 0xFF
        elif ftype == 4:
            p = a + b - c
            pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
            if pa <= pb and pa <= pc:
                pred = a
            elif pb <= pc:
                pred = b
            else:
                pred = c
            res[x] = (v + pred) & 0xFF
        else:
            raise MalformedHeaderError(f"invalid PNG filter type {ftype}")
    return res


def _png_chunk(ctype: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + ctype
        + payload
        + struct.pack(">I", zlib.crc32(ctype + payload) & 0xFFFFFFFF)
    )


def _encode_png(quantized: np.ndarray) -> bytes:
    h, w = quantized.shape[:2]
    color = 0 if quantized.ndim == 2 else 2
    ihdr = struct.pack(">IIBBBBB", w, h, 8, color, 0, 0, 0)
    rows = quantized.reshape(h, -1)
    raw = b"".join(b"\x00" + rows[y].tobytes() for y in range(h))
    return (
        PNG_SIGNATURE
        + _png_chunk(b"IHDR", ihdr)
        + _png_chunk(b"IDAT", zlib.compress(raw, 6))
        + _png_chunk(b"IEND", b"")
    )
