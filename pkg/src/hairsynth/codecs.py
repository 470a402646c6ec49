"""Lossless image encode/decode: 8-bit PNG and binary PPM (P6).

Both directions are deliberately dependency-free (stdlib zlib only) so that
encoding is byte-deterministic for a fixed input and decode errors can name
the exact byte offset of the problem. 8-bit channels map to float via c/255;
floats encode via round-half-up. Missing alpha fills with 1.

PNG support: bit depth 8, color types 0 (gray), 2 (RGB), 4 (gray+alpha),
6 (RGBA), no interlacing. Encode always writes color type 6, filter 0 rows,
zlib level 9. PPM: P6 with maxval 255 (alpha dropped on encode).
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .raster import Image, quantize_u8

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

_PNG_CHANNELS = {0: 1, 2: 3, 4: 2, 6: 4}


class MalformedImageError(ValueError):
    """Byte stream is not a well-formed image in its declared format."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class UnsupportedImageError(ValueError):
    """Well-formed image using a feature outside the supported profile."""


def decode_image(data: bytes) -> Image:
    """Decode PNG or binary PPM bytes into a float RGBA Image."""
    if data[:8] == PNG_SIGNATURE:
        return _decode_png(data)
    if data[:2] == b"P6":
        return _decode_ppm(data)
    raise MalformedImageError("not a PNG or binary PPM (P6) stream", 0)


def encode_image(img: Image, format: str = "png") -> bytes:
    """Encode an Image losslessly (to 8-bit precision) as PNG or PPM."""
    if format == "png":
        return _encode_png(img)
    if format == "ppm":
        return _encode_ppm(img)
    raise ValueError(f"unknown format {format!r} (expected 'png' or 'ppm')")


# --- PNG ---------------------------------------------------------------


def _decode_png(data: bytes) -> Image:
    pos = 8
    header = None
    idat = bytearray()
    saw_end = False
    while pos < len(data):
        if pos + 8 > len(data):
            raise MalformedImageError("truncated chunk header", pos)
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        ctype = data[pos + 4 : pos + 8]
        body_at = pos + 8
        if body_at + length + 4 > len(data):
            raise MalformedImageError(
                f"truncated {ctype.decode('latin1')} chunk", pos
            )
        body = data[body_at : body_at + length]
        (crc,) = struct.unpack(">I", data[body_at + length : body_at + length + 4])
        if zlib.crc32(ctype + body) & 0xFFFFFFFF != crc:
            raise MalformedImageError(
                f"CRC mismatch in {ctype.decode('latin1')} chunk", body_at + length
            )
        if ctype == b"IHDR":
            if header is not None:
                raise MalformedImageError("duplicate IHDR chunk", pos)
            if length != 13:
                raise MalformedImageError("IHDR length must be 13", pos)
            header = struct.unpack(">IIBBBBB", body)
        elif ctype == b"IDAT":
            if header is None:
                raise MalformedImageError("IDAT before IHDR", pos)
            idat.extend(body)
        elif ctype == b"IEND":
            saw_end = True
            break
        # Ancillary chunks (tRNS, gAMA, ...) are skipped: no color management.
        pos = body_at + length + 4
    if header is None:
        raise MalformedImageError("missing IHDR chunk", len(data))
    if not saw_end:
        raise MalformedImageError("missing IEND chunk", len(data))

    width, height, depth, color_type, compression, filt, interlace = header
    if width < 1 or height < 1:
        raise MalformedImageError("non-positive dimensions in IHDR", 16)
    if depth != 8:
        raise UnsupportedImageError(f"unsupported bit depth {depth} (only 8)")
    if color_type not in _PNG_CHANNELS:
        raise UnsupportedImageError(f"unsupported color type {color_type}")
    if compression != 0 or filt != 0:
        raise MalformedImageError("unknown compression/filter method in IHDR", 24)
    if interlace != 0:
        raise UnsupportedImageError("interlaced (Adam7) PNG not supported")

    try:
        raw = zlib.decompress(bytes(idat))
    except zlib.error as e:
        raise MalformedImageError(f"bad zlib stream in IDAT: {e}", 8) from e

    channels = _PNG_CHANNELS[color_type]
    stride = width * channels
    if len(raw) != height * (stride + 1):
        raise MalformedImageError(
            f"decompressed pixel data has {len(raw)} bytes, "
            f"expected {height * (stride + 1)}",
            8,
        )
    pixels = _unfilter(raw, height, stride, channels)

    arr = pixels.reshape(height, width, channels).astype(np.float64) / 255.0
    out = np.empty((height, width, 4), dtype=np.float64)
    if color_type == 0:
        out[:, :, 0] = out[:, :, 1] = out[:, :, 2] = arr[:, :, 0]
        out[:, :, 3] = 1.0
    elif color_type == 2:
        out[:, :, :3] = arr
        out[:, :, 3] = 1.0
    elif color_type == 4:
        out[:, :, 0] = out[:, :, 1] = out[:, :, 2] = arr[:, :, 0]
        out[:, :, 3] = arr[:, :, 1]
    else:
        out[:, :] = arr
    return Image(out, _validate=False)


def _unfilter(raw: bytes, height: int, stride: int, bpp: int) -> np.ndarray:
    """Undo PNG per-row filtering (types 0-4)."""
    out = np.zeros((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    src = np.frombuffer(raw, dtype=np.uint8)
    for y in range(height):
        ftype = int(src[y * (stride + 1)])
        row = src[y * (stride + 1) + 1 : (y + 1) * (stride + 1)].copy()
        if ftype == 0:
            pass
        elif ftype == 1:  # Sub: prefix sum per byte lane
            for lane in range(bpp):
                row[lane::bpp] = np.cumsum(row[lane::bpp], dtype=np.uint64) & 0xFF
        elif ftype == 2:  # Up
            row = (row.astype(np.uint16) + prev) & 0xFF
            row = row.astype(np.uint8)
        elif ftype == 3:  # Average
            rec = row.astype(np.int32)
            for x in range(stride):
                left = int(rec[x - bpp]) if x >= bpp else 0
                rec[x] = (rec[x] + (left + int(prev[x])) // 2) & 0xFF
            row = rec.astype(np.uint8)
        elif ftype == 4:  # Paeth
            rec = row.astype(np.int32)
            for x in range(stride):
                left = int(rec[x - bpp]) if x >= bpp else 0
                up = int(prev[x])
                ul = int(prev[x - bpp]) if x >= bpp else 0
                p = left + up - ul
                pa, pb, pc = abs(p - left), abs(p - up), abs(p - ul)
                if pa <= pb and pa <= pc:
                    pred = left
                elif pb <= pc:
                    pred = up
                else:
                    pred = ul
                rec[x] = (rec[x] + pred) & 0xFF
            row = rec.astype(np.uint8)
        else:
            raise MalformedImageError(f"unknown row filter type {ftype}", 8)
        out[y] = row
        prev = out[y]
    return out


def _png_chunk(ctype: bytes, body: bytes) -> bytes:
    return (
        struct.pack(">I", len(body))
        + ctype
        + body
        + struct.pack(">I", zlib.crc32(ctype + body) & 0xFFFFFFFF)
    )


def _encode_png(img: Image) -> bytes:
    q = quantize_u8(img.data)
    height, width = q.shape[:2]
    stride = width * 4
    rows = bytearray()
    flat = q.reshape(height, stride)
    for y in range(height):
        rows.append(0)  # filter type None: deterministic, no heuristics
        rows.extend(flat[y].tobytes())
    ihdr = struct.pack(">IIBBBBB", width, height, 8, 6, 0, 0, 0)
    idat = zlib.compress(bytes(rows), 9)
    return (
        PNG_SIGNATURE
        + _png_chunk(b"IHDR", ihdr)
        + _png_chunk(b"IDAT", idat)
        + _png_chunk(b"IEND", b"")
    )


# --- PPM (binary P6) ---------------------------------------------------


def _decode_ppm(data: bytes) -> Image:
    pos = 2  # past "P6"

    def next_token() -> tuple[bytes, int]:
        nonlocal pos
        while pos < len(data):
            c = data[pos : pos + 1]
            if c == b"#":
                while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            elif c.isspace():
                pos += 1
            else:
                break
        if pos >= len(data):
            raise MalformedImageError("truncated PPM header", pos)
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        return data[start:pos], start

    fields = []
    for _ in range(3):
        tok, at = next_token()
        if not tok.isdigit():
            raise MalformedImageError(f"expected integer in PPM header, got {tok!r}", at)
        fields.append(int(tok))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MalformedImageError("non-positive PPM dimensions", 2)
    if maxval != 255:
        raise UnsupportedImageError(f"unsupported PPM maxval {maxval} (only 255)")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise MalformedImageError("missing whitespace after PPM maxval", pos)
    pos += 1  # exactly one whitespace byte before raster data

    need = width * height * 3
    if len(data) - pos < need:
        raise MalformedImageError(
            f"PPM pixel data truncated: need {need} bytes, have {len(data) - pos}",
            len(data),
        )
    raw = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos)
    rgb = raw.reshape(height, width, 3).astype(np.float64) / 255.0
    out = np.empty((height, width, 4), dtype=np.float64)
    out[:, :, :3] = rgb
    out[:, :, 3] = 1.0
    return Image(out, _validate=False)


def _encode_ppm(img: Image) -> bytes:
    q = quantize_u8(img.data)
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + q[:, :, :3].tobytes()
