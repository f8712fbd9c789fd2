"""Binary checkpoints.

Layout (little-endian throughout)::

    magic   4s   b"NEMD"
    version u16  1
    n       u32
    L       f64
    t       f64
    nu, lambda, gamma  3 x f64
    mode    u8   0 = angle, 1 = vector
    payload f64  row-major fields (see below)
    crc     u64  CRC-64/XZ of every preceding byte

Angle mode stores ``Re u1_hat, Im u1_hat, Re u2_hat, Im u2_hat,
Re theta_hat, Im theta_hat``; vector mode stores the four velocity
blocks followed by the physical ``d1, d2``.  Each block is ``n x n``.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from ..errors import CheckpointError
from ..model import ANGLE, VECTOR, FlowState, Params
from ..spectral import make_grid

MAGIC = b"NEMD"
VERSION = 1
HEADER = struct.Struct("<4sHIdd3dB")
_MODE_CODES = {ANGLE: 0, VECTOR: 1}
_CODE_MODES = {v: k for k, v in _MODE_CODES.items()}

_CRC_POLY = 0xC96C5795D7870F42


def _crc_table():
    table = []
    for i in range(256):
        c = i
        for _ in range(8):
            c = (c >> 1) ^ _CRC_POLY if c & 1 else c >> 1
        table.append(c)
    return table


_TABLE = _crc_table()


def crc64(data: bytes, crc: int = 0) -> int:
    """CRC-64/XZ (reflected ECMA-182 polynomial, init and xorout all ones)."""
    c = crc ^ 0xFFFFFFFFFFFFFFFF
    table = _TABLE
    for b in data:
        c = table[(c ^ b) & 0xFF] ^ (c >> 8)
    return c ^ 0xFFFFFFFFFFFFFFFF


def _blocks(state: FlowState):
    u = state.u_hat
    blocks = [u[0].real, u[0].imag, u[1].real, u[1].imag]
    if state.mode == ANGLE:
        blocks += [state.theta_hat.real, state.theta_hat.imag]
    else:
        blocks += [state.d[0], state.d[1]]
    return blocks


def encode_checkpoint(state: FlowState) -> bytes:
    p = state.params
    head = HEADER.pack(MAGIC, VERSION, state.grid.n, state.grid.length, state.t,
                       p.nu, p.lam, p.gamma, _MODE_CODES[state.mode])
    payload = b"".join(np.ascontiguousarray(b, dtype="<f8").tobytes() for b in _blocks(state))
    body = head + payload
    return body + struct.pack("<Q", crc64(body))


def _complex(re, im):
    # assemble by assignment so signed zeros survive bit for bit
    out = np.empty(re.shape, dtype=complex)
    out.real = re
    out.imag = im
    return out


def decode_checkpoint(data: bytes) -> FlowState:
    """Inverse of :func:`encode_checkpoint`; verifies size and checksum first."""
    if len(data) < HEADER.size + 8:
        raise CheckpointError(f"checksum error: file truncated to {len(data)} bytes")
    magic, version, n, length, t, nu, lam, gamma, code = HEADER.unpack_from(data)
    expected = HEADER.size + 6 * n * n * 8 + 8 if 0 < n <= 1 << 14 else -1
    if len(data) != expected:
        raise CheckpointError(
            f"checksum error: expected {expected} bytes for n = {n}, found {len(data)}")
    (stored,) = struct.unpack_from("<Q", data, len(data) - 8)
    if crc64(data[:-8]) != stored:
        raise CheckpointError("checksum error: payload corrupted")
    if magic != MAGIC:
        raise CheckpointError(f"bad magic {magic!r}")
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version} (expected {VERSION})")
    if code not in _CODE_MODES:
        raise CheckpointError(f"unknown director mode code {code}")
    grid = make_grid(n, length)
    arr = np.frombuffer(data, dtype="<f8", count=6 * n * n, offset=HEADER.size)
    blocks = arr.reshape(6, n, n).astype(np.float64)
    u_hat = np.stack([_complex(blocks[0], blocks[1]), _complex(blocks[2], blocks[3])])
    params = Params(nu, lam, gamma)
    if _CODE_MODES[code] == ANGLE:
        return FlowState(grid, t, u_hat, theta_hat=_complex(blocks[4], blocks[5]), params=params)
    return FlowState(grid, t, u_hat, d=blocks[4:6], params=params)


def atomic_write_bytes(path, data: bytes):
    """Write to a temporary sibling and rename over ``path``."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def write_checkpoint(state: FlowState, path):
    try:
        atomic_write_bytes(path, encode_checkpoint(state))
    except OSError as exc:
        raise CheckpointError(f"cannot write checkpoint {os.fspath(path)!r}: {exc}") from exc


def read_checkpoint(path) -> FlowState:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {os.fspath(path)!r}: {exc}") from exc
    return decode_checkpoint(data)


def checkpoint_header(path) -> dict:
    """Header fields plus checksum status, without building the state."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < HEADER.size:
        raise CheckpointError(f"checksum error: file truncated to {len(data)} bytes")
    magic, version, n, length, t, nu, lam, gamma, code = HEADER.unpack_from(data)
    ok = len(data) == HEADER.size + 6 * n * n * 8 + 8 and \
        crc64(data[:-8]) == struct.unpack_from("<Q", data, len(data) - 8)[0]
    return {
        "magic": magic.decode("ascii", "replace"), "version": version, "n": n, "length": length,
        "t": t, "nu": nu, "lambda": lam, "gamma": gamma,
        "mode": _CODE_MODES.get(code, f"unknown({code})"), "bytes": len(data), "checksum_ok": ok,
    }


__all__ = [
    "MAGIC", "VERSION", "HEADER", "crc64", "encode_checkpoint", "decode_checkpoint",
    "write_checkpoint", "read_checkpoint", "checkpoint_header", "atomic_write_bytes",
    "atomic_write_text",
]
