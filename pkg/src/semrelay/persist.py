"""Binary model files.

Layout (little-endian): 8 magic bytes ``SEMRELAY``, u32 format version,
length-prefixed kind tag, u32 dim count + u32 dims, then the parameter sets:
u32 set count, each set a length-prefixed role tag, u32 parameter count, and
per parameter a length-prefixed name, u32 rank, u32 shape, float32 payload.
Weights are stored in 32-bit; loading promotes back to the 64-bit compute
precision.
"""

from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

from .autoencoder import AutoEncoderConfig, AutoEncoderModel
from .codec.model import CodecConfig, SemanticCodecModel
from .errors import (
    DimMismatchError,
    LoadError,
    MagicMismatchError,
    RoleMismatchError,
    TruncatedFileError,
    VersionMismatchError,
)
from .nn import ParameterSet, ROLE_AUTO_DECODER, ROLE_AUTO_ENCODER, ROLE_SEMANTIC_DECODER, ROLE_SEMANTIC_ENCODER

MAGIC = b"SEMRELAY"
VERSION = 1

KIND_AUTOENCODER = "autoencoder"
KIND_CODEC = "semantic-codec"

_ACTIVATION_IDS = {"identity": 0, "relu": 1, "tanh": 2}
_ACTIVATION_NAMES = {v: k for k, v in _ACTIVATION_IDS.items()}


def _write_str(buf: io.BytesIO, s: str) -> None:
    raw = s.encode("utf-8")
    buf.write(struct.pack("<I", len(raw)))
    buf.write(raw)


def _write_dims(buf: io.BytesIO, dims: list[int]) -> None:
    buf.write(struct.pack("<I", len(dims)))
    buf.write(struct.pack(f"<{len(dims)}I", *dims))


def _write_set(buf: io.BytesIO, ps: ParameterSet) -> None:
    _write_str(buf, ps.role)
    buf.write(struct.pack("<I", len(ps)))
    for name, t in ps.items():
        _write_str(buf, name)
        buf.write(struct.pack("<I", t.ndim))
        buf.write(struct.pack(f"<{t.ndim}I", *t.shape))
        buf.write(np.ascontiguousarray(t.data, dtype="<f4").tobytes())


class _Reader:
    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def read(self, n: int) -> bytes:
        if self._pos + n > len(self._data):
            raise TruncatedFileError(
                f"expected {n} more bytes at offset {self._pos}, "
                f"file has {len(self._data)}")
        out = self._data[self._pos:self._pos + n]
        self._pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.read(4))[0]

    def string(self) -> str:
        return self.read(self.u32()).decode("utf-8")

    def dims(self) -> list[int]:
        n = self.u32()
        return list(struct.unpack(f"<{n}I", self.read(4 * n)))

    def f32_array(self, shape: tuple[int, ...]) -> np.ndarray:
        count = int(np.prod(shape)) if shape else 1
        raw = self.read(4 * count)
        return np.frombuffer(raw, dtype="<f4").astype(np.float64).reshape(shape)

    def done(self) -> bool:
        return self._pos == len(self._data)


def _read_set(r: _Reader, expected_role: str) -> ParameterSet:
    role = r.string()
    if role != expected_role:
        raise RoleMismatchError(f"expected role {expected_role!r}, file has {role!r}")
    ps = ParameterSet(role)
    for _ in range(r.u32()):
        name = r.string()
        ndim = r.u32()
        shape = tuple(struct.unpack(f"<{ndim}I", r.read(4 * ndim)))
        ps.add(name, r.f32_array(shape))
    return ps


def save_autoencoder(model: AutoEncoderModel, path: str | Path) -> None:
    cfg = model.config
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<I", VERSION))
    _write_str(buf, KIND_AUTOENCODER)
    _write_dims(buf, [cfg.input_dim, cfg.hidden_dim, cfg.n_symbols,
                      _ACTIVATION_IDS[cfg.activation]])
    buf.write(struct.pack("<d", cfg.power))
    buf.write(struct.pack("<I", 2))
    _write_set(buf, model.encoder)
    _write_set(buf, model.decoder)
    Path(path).write_bytes(buf.getvalue())


def save_codec(model: SemanticCodecModel, path: str | Path) -> None:
    cfg = model.config
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<I", VERSION))
    _write_str(buf, KIND_CODEC)
    _write_dims(buf, [model.vocab_size, cfg.d_model, cfg.n_encoder_blocks,
                      cfg.n_decoder_blocks, cfg.n_heads, cfg.ff_dim,
                      cfg.max_len, cfg.batch_size, int(cfg.positional)])
    buf.write(struct.pack("<I", 2))
    _write_set(buf, model.alpha)
    _write_set(buf, model.eta)
    Path(path).write_bytes(buf.getvalue())


def save_model(model, path: str | Path) -> None:
    if isinstance(model, AutoEncoderModel):
        save_autoencoder(model, path)
    elif isinstance(model, SemanticCodecModel):
        save_codec(model, path)
    else:
        raise LoadError(f"cannot persist object of type {type(model).__name__}")


def _open(path: str | Path) -> tuple[_Reader, str]:
    r = _Reader(Path(path).read_bytes())
    if r.read(len(MAGIC)) != MAGIC:
        raise MagicMismatchError(f"{path} is not a model file (bad magic)")
    version = r.u32()
    if version != VERSION:
        raise VersionMismatchError(f"unsupported format version {version}")
    return r, r.string()


def load_autoencoder(path: str | Path) -> AutoEncoderModel:
    r, kind = _open(path)
    if kind != KIND_AUTOENCODER:
        raise RoleMismatchError(f"expected {KIND_AUTOENCODER!r} file, got {kind!r}")
    dims = r.dims()
    if len(dims) != 4:
        raise DimMismatchError(f"autoencoder header needs 4 dims, got {len(dims)}")
    power = struct.unpack("<d", r.read(8))[0]
    cfg = AutoEncoderConfig(input_dim=dims[0], hidden_dim=dims[1], n_symbols=dims[2],
                            activation=_ACTIVATION_NAMES[dims[3]], power=power)
    if r.u32() != 2:
        raise DimMismatchError("autoencoder file must contain exactly 2 parameter sets")
    enc = _read_set(r, ROLE_AUTO_ENCODER)
    dec = _read_set(r, ROLE_AUTO_DECODER)
    model = AutoEncoderModel(enc, dec, cfg)  # validates dims against config
    if not r.done():
        raise TruncatedFileError("trailing bytes after model payload")
    return model


def load_codec(path: str | Path) -> SemanticCodecModel:
    r, kind = _open(path)
    if kind != KIND_CODEC:
        raise RoleMismatchError(f"expected {KIND_CODEC!r} file, got {kind!r}")
    dims = r.dims()
    if len(dims) != 9:
        raise DimMismatchError(f"codec header needs 9 dims, got {len(dims)}")
    vocab_size = dims[0]
    cfg = CodecConfig(d_model=dims[1], n_encoder_blocks=dims[2],
                      n_decoder_blocks=dims[3], n_heads=dims[4], ff_dim=dims[5],
                      max_len=dims[6], batch_size=dims[7], positional=bool(dims[8]))
    if r.u32() != 2:
        raise DimMismatchError("codec file must contain exactly 2 parameter sets")
    alpha = _read_set(r, ROLE_SEMANTIC_ENCODER)
    eta = _read_set(r, ROLE_SEMANTIC_DECODER)
    if alpha["embed"].shape != (vocab_size, cfg.d_model):
        raise DimMismatchError(
            f"embedding shape {alpha['embed'].shape} does not match header "
            f"V={vocab_size}, D={cfg.d_model}")
    if not r.done():
        raise TruncatedFileError("trailing bytes after model payload")
    return SemanticCodecModel(alpha, eta, cfg, vocab_size)


def load_model(path: str | Path):
    _, kind = _open(path)
    if kind == KIND_AUTOENCODER:
        return load_autoencoder(path)
    if kind == KIND_CODEC:
        return load_codec(path)
    raise RoleMismatchError(f"unknown model kind {kind!r}")
