"""On-disk `.idz` archive: header, chunk index, per-chunk bitstreams.

Fixed little-endian layout, byte-exact across platforms:

    magic "IDZ1" | version u8 | model_id_hash 8B | total_log2 u8
    | chunk_chars u32 | chunk_count u32 | original_byte_len u64
    | plaintext checksum 8B
    then per chunk: bit_length u32 + ceil(bit_length/8) payload bytes.

The checksum covers the decompressed plaintext, so corruption anywhere in
the file is caught by the strongest end-to-end check.
"""

from __future__ import annotations

import hashlib
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .coder import MAX_TOTAL_LOG2, MIN_TOTAL_LOG2, BitStream, decode, default_total, encode
from .codelen import ChunkPlan
from .errors import (
    BadMagic,
    ChecksumMismatch,
    FormatOverflow,
    ModelMismatch,
    TruncatedFile,
    UnsupportedVersion,
)
from .models import EntropyModel, ModelDescriptor

MAGIC = b"IDZ1"
VERSION = 1

_HEADER = struct.Struct("<4sB8sBIIQ8s")
_CHUNK_LEN = struct.Struct("<I")


def descriptor_hash(descriptor: ModelDescriptor) -> bytes:
    """Stable 8-byte fingerprint of a model configuration."""
    return hashlib.blake2b(descriptor.fingerprint_text().encode(), digest_size=8).digest()


def plaintext_checksum(data: bytes) -> bytes:
    return hashlib.blake2b(data, digest_size=8).digest()


@dataclass(frozen=True)
class ContainerHeader:
    model_id_hash: bytes
    total_log2: int
    chunk_chars: int
    chunk_count: int
    original_byte_len: int
    checksum: bytes
    version: int = VERSION

    def __post_init__(self) -> None:
        if len(self.model_id_hash) != 8 or len(self.checksum) != 8:
            raise ValueError("hashes must be exactly 8 bytes")
        if not (MIN_TOTAL_LOG2 <= self.total_log2 <= MAX_TOTAL_LOG2):
            raise ValueError(f"total_log2 {self.total_log2} outside [{MIN_TOTAL_LOG2}, {MAX_TOTAL_LOG2}]")
        for name, value, limit in (
            ("chunk_chars", self.chunk_chars, 1 << 32),
            ("chunk_count", self.chunk_count, 1 << 32),
            ("original_byte_len", self.original_byte_len, 1 << 64),
        ):
            if not (0 <= value < limit):
                raise FormatOverflow(f"{name}={value} does not fit its field")


def pack(header: ContainerHeader, streams: Sequence[BitStream]) -> bytes:
    if header.chunk_count != len(streams):
        raise ValueError("header chunk_count disagrees with the stream list")
    out = bytearray(
        _HEADER.pack(
            MAGIC,
            header.version,
            header.model_id_hash,
            header.total_log2,
            header.chunk_chars,
            header.chunk_count,
            header.original_byte_len,
            header.checksum,
        )
    )
    for stream in streams:
        if stream.length_bits >= 1 << 32:
            raise FormatOverflow("chunk bitstream exceeds the u32 bit-length field")
        out += _CHUNK_LEN.pack(stream.length_bits)
        out += stream.to_bytes()
    return bytes(out)


def unpack(data: bytes) -> tuple[ContainerHeader, list[BitStream]]:
    if len(data) < _HEADER.size:
        raise TruncatedFile(f"{len(data)} bytes is shorter than the header")
    magic, version, mhash, total_log2, chunk_chars, chunk_count, orig_len, checksum = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"not an IDZ archive (magic {magic!r})")
    if version != VERSION:
        raise UnsupportedVersion(f"container version {version}")
    header = ContainerHeader(
        model_id_hash=mhash,
        total_log2=total_log2,
        chunk_chars=chunk_chars,
        chunk_count=chunk_count,
        original_byte_len=orig_len,
        checksum=checksum,
        version=version,
    )
    streams: list[BitStream] = []
    pos = _HEADER.size
    for _ in range(chunk_count):
        if pos + _CHUNK_LEN.size > len(data):
            raise TruncatedFile("chunk index ends early")
        (bit_length,) = _CHUNK_LEN.unpack_from(data, pos)
        pos += _CHUNK_LEN.size
        nbytes = (bit_length + 7) // 8
        if pos + nbytes > len(data):
            raise TruncatedFile("chunk payload ends early")
        streams.append(BitStream(data[pos : pos + nbytes], bit_length))
        pos += nbytes
    return header, streams


def compress_text(
    model: EntropyModel,
    text: str,
    chunk_chars: int | None = None,
    total_log2: int | None = None,
    jobs: int | None = None,
) -> bytes:
    """Chunk, encode, and pack `text` into an archive byte string."""
    from .codelen import DEFAULT_CHUNK_CHARS

    chunk_chars = chunk_chars or DEFAULT_CHUNK_CHARS
    if total_log2 is None:
        total_log2 = default_total(model.vocab.size).bit_length() - 1
    raw = text.encode("utf-8", "surrogateescape")
    if text:
        plan = ChunkPlan.for_text(text, chunk_chars)
        pieces = plan.slices(text)
    else:
        pieces = []

    def one(piece: str) -> BitStream:
        return encode(model, model.tokenize(piece), total=1 << total_log2)

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            streams = list(pool.map(one, pieces))
    else:
        streams = [one(p) for p in pieces]
    header = ContainerHeader(
        model_id_hash=descriptor_hash(model.descriptor),
        total_log2=total_log2,
        chunk_chars=chunk_chars,
        chunk_count=len(streams),
        original_byte_len=len(raw),
        checksum=plaintext_checksum(raw),
    )
    return pack(header, streams)


def decompress_text(model: EntropyModel, data: bytes, jobs: int | None = None) -> str:
    """Inverse of compress_text; refuses the wrong model before decoding."""
    header, streams = unpack(data)
    if descriptor_hash(model.descriptor) != header.model_id_hash:
        raise ModelMismatch("archive was written with a different model configuration")
    total = 1 << header.total_log2

    def one(stream: BitStream) -> str:
        return model.detokenize(decode(model, stream, total=total))

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            pieces = list(pool.map(one, streams))
    else:
        pieces = [one(s) for s in streams]
    text = "".join(pieces)
    raw = text.encode("utf-8", "surrogateescape")
    if len(raw) != header.original_byte_len or plaintext_checksum(raw) != header.checksum:
        raise ChecksumMismatch("decompressed plaintext does not match the stored checksum")
    return text
