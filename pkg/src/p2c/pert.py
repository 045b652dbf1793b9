"""PERT encoder: pinyin ids in, per-position character distributions out.

The architecture is a standard bidirectional transformer encoder with learned
absolute position embeddings, post-layernorm residual blocks, erf-exact GELU,
and an untied [H, |C|] classifier head.  There is deliberately no segment
embedding: the input is a single pinyin sequence, nothing else.  Sequences are
processed at their true length (max_len caps it at 16 by default) so no
attention masking exists anywhere.

Weight file (PERTW1): magic ``PERTW1``, a uint32 little-endian byte length,
a UTF-8 JSON manifest, then one contiguous blob of little-endian float32
row-major tensor data.  The manifest carries the config, sha256 checksums of
the pinyin and char vocabularies, ``dtype``/``layout`` markers, an ordered
tensor table of (name, shape, offset), and a sha256 of the data blob.  The
tensor table must list exactly the canonical tensor set for the config, packed
contiguously from offset 0.
"""

from __future__ import annotations

import hashlib
import json
import math
import struct
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import (ChecksumMismatch, EmptyInput, FormatError, InvalidTokenId,
                     SequenceTooLong, ShapeMismatch)

MAGIC = b"PERTW1"

# The miniature grid: scale name -> (layers, hidden). Heads follow H/64.
SCALES = {
    "tiny": (2, 128),
    "mini": (4, 256),
    "small": (4, 512),
    "medium": (8, 512),
    "base": (12, 768),
}


@dataclass(frozen=True)
class PertConfig:
    num_layers: int
    hidden_size: int
    num_heads: int
    pinyin_vocab_size: int
    char_vocab_size: int
    ff_size: int = 0          # 0 means the conventional 4*hidden
    max_len: int = 16
    layernorm_epsilon: float = 1e-12

    def __post_init__(self):
        if self.ff_size == 0:
            object.__setattr__(self, "ff_size", 4 * self.hidden_size)
        if self.hidden_size % self.num_heads != 0:
            raise ValueError(
                f"hidden size {self.hidden_size} not divisible by "
                f"{self.num_heads} heads")
        if self.max_len < 1:
            raise ValueError("max_len must be at least 1")
        for name in ("num_layers", "hidden_size", "num_heads",
                     "pinyin_vocab_size", "char_vocab_size", "ff_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_scale(cls, scale, pinyin_vocab_size, char_vocab_size, **kw):
        if scale not in SCALES:
            raise ValueError(f"unknown scale {scale!r}; choose from "
                             f"{sorted(SCALES)}")
        layers, hidden = SCALES[scale]
        return cls(num_layers=layers, hidden_size=hidden,
                   num_heads=hidden // 64,
                   pinyin_vocab_size=pinyin_vocab_size,
                   char_vocab_size=char_vocab_size, **kw)

    def to_dict(self):
        return {
            "num_layers": self.num_layers,
            "hidden_size": self.hidden_size,
            "num_heads": self.num_heads,
            "ff_size": self.ff_size,
            "pinyin_vocab_size": self.pinyin_vocab_size,
            "char_vocab_size": self.char_vocab_size,
            "max_len": self.max_len,
            "layernorm_epsilon": self.layernorm_epsilon,
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(**{k: d[k] for k in (
                "num_layers", "hidden_size", "num_heads", "ff_size",
                "pinyin_vocab_size", "char_vocab_size", "max_len",
                "layernorm_epsilon")})
        except KeyError as exc:
            raise FormatError(f"manifest config missing field {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise FormatError(f"invalid manifest config: {exc}") from exc


def tensor_table(config):
    """Canonical (name, shape) list, in serialization order."""
    h, f = config.hidden_size, config.ff_size
    table = [
        ("token_embedding", (config.pinyin_vocab_size, h)),
        ("position_embedding", (config.max_len, h)),
        ("embeddings.layernorm.gamma", (h,)),
        ("embeddings.layernorm.beta", (h,)),
    ]
    for i in range(config.num_layers):
        base = f"layers.{i}"
        for proj in ("query", "key", "value", "output"):
            table.append((f"{base}.attention.{proj}.weight", (h, h)))
            table.append((f"{base}.attention.{proj}.bias", (h,)))
        table.append((f"{base}.attention.layernorm.gamma", (h,)))
        table.append((f"{base}.attention.layernorm.beta", (h,)))
        table.append((f"{base}.ffn.intermediate.weight", (h, f)))
        table.append((f"{base}.ffn.intermediate.bias", (f,)))
        table.append((f"{base}.ffn.output.weight", (f, h)))
        table.append((f"{base}.ffn.output.bias", (h,)))
        table.append((f"{base}.ffn.layernorm.gamma", (h,)))
        table.append((f"{base}.ffn.layernorm.beta", (h,)))
    table.append(("classifier.weight", (h, config.char_vocab_size)))
    table.append(("classifier.bias", (config.char_vocab_size,)))
    return table


class PertWeights:
    """Name -> float32 array, validated against the config's tensor table."""

    def __init__(self, config, tensors):
        expected = dict(tensor_table(config))
        for name in tensors:
            if name not in expected:
                if "segment" in name:
                    raise FormatError(
                        "manifest declares a segment embedding; the "
                        "architecture has none")
                raise FormatError(f"unexpected tensor {name!r}")
        self.tensors = {}
        for name, shape in expected.items():
            if name not in tensors:
                raise FormatError(f"missing tensor {name!r}")
            arr = np.ascontiguousarray(tensors[name], dtype=np.float32)
            if arr.shape != shape:
                raise ShapeMismatch(name, shape, arr.shape)
            if not np.isfinite(arr).all():
                raise FormatError(f"non-finite values in tensor {name!r}")
            self.tensors[name] = arr

    def __getitem__(self, name):
        return self.tensors[name]


def save_weights(path, config, weights, pinyin_checksum, char_checksum):
    """Write a PERTW1 file; tensors packed contiguously in canonical order."""
    table = tensor_table(config)
    entries = []
    blob = bytearray()
    for name, _ in table:
        arr = weights[name]
        entries.append({"name": name, "shape": list(arr.shape),
                        "offset": len(blob)})
        blob.extend(arr.astype("<f4", copy=False).tobytes(order="C"))
    manifest = {
        "config": config.to_dict(),
        "pinyin_vocab_sha256": pinyin_checksum,
        "char_vocab_sha256": char_checksum,
        "dtype": "float32",
        "layout": "row-major",
        "tensors": entries,
        "data_sha256": hashlib.sha256(bytes(blob)).hexdigest(),
    }
    payload = json.dumps(manifest, ensure_ascii=False,
                         separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(payload)))
        fh.write(payload)
        fh.write(bytes(blob))


def load_weights(path, char_dict=None):
    """Read a PERTW1 file back into (PertConfig, PertWeights).

    When a CharDict is supplied, the manifest vocab checksums must match it;
    a file trained against other vocabularies raises ChecksumMismatch.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:len(MAGIC)] != MAGIC:
        raise FormatError("not a PERTW1 file")
    if len(data) < len(MAGIC) + 4:
        raise FormatError("truncated before manifest length")
    (manifest_len,) = struct.unpack_from("<I", data, len(MAGIC))
    manifest_start = len(MAGIC) + 4
    blob_start = manifest_start + manifest_len
    if blob_start > len(data):
        raise FormatError("truncated manifest")
    try:
        manifest = json.loads(data[manifest_start:blob_start].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"manifest is not valid JSON: {exc}") from exc
    for key in ("config", "pinyin_vocab_sha256", "char_vocab_sha256",
                "dtype", "layout", "tensors"):
        if key not in manifest:
            raise FormatError(f"manifest missing {key!r}")
    if manifest["dtype"] != "float32":
        raise FormatError(f"unsupported dtype {manifest['dtype']!r}")
    if manifest["layout"] != "row-major":
        raise FormatError(f"unsupported layout {manifest['layout']!r}")
    config = PertConfig.from_dict(manifest["config"])

    if char_dict is not None:
        if manifest["pinyin_vocab_sha256"] != char_dict.syllable_checksum():
            raise ChecksumMismatch("pinyin vocabulary differs from the "
                                   "dictionary this engine loaded")
        if manifest["char_vocab_sha256"] != char_dict.char_checksum():
            raise ChecksumMismatch("char vocabulary differs from the "
                                   "dictionary this engine loaded")
        if config.pinyin_vocab_size != char_dict.num_syllables:
            raise ChecksumMismatch("pinyin vocab size disagrees with the "
                                   "dictionary")
        if config.char_vocab_size != char_dict.num_chars:
            raise ChecksumMismatch("char vocab size disagrees with the "
                                   "dictionary")

    blob = data[blob_start:]
    if manifest.get("data_sha256") is not None:
        if hashlib.sha256(blob).hexdigest() != manifest["data_sha256"]:
            raise ChecksumMismatch("tensor data does not match its manifest "
                                   "digest")

    declared = {}
    offset = 0
    for entry in manifest["tensors"]:
        try:
            name, shape = entry["name"], tuple(entry["shape"])
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed tensor entry {entry!r}") from exc
        if entry.get("offset") != offset:
            raise FormatError(f"tensor {name!r} not packed contiguously")
        size = 4 * math.prod(shape)
        if offset + size > len(blob):
            raise FormatError(f"file truncated inside tensor {name!r}")
        arr = np.frombuffer(blob, dtype="<f4", count=math.prod(shape),
                            offset=offset).reshape(shape)
        declared[name] = arr
        offset += size
    if offset != len(blob):
        raise FormatError(f"{len(blob) - offset} trailing bytes after tensors")

    expected = tensor_table(config)
    for name, shape in expected:
        if name in declared and declared[name].shape != shape:
            raise ShapeMismatch(name, shape, declared[name].shape)
    return config, PertWeights(config, declared)


@dataclass(frozen=True)
class EmissionMatrix:
    """Per-position character distributions for one pinyin sequence."""
    n: int
    probs: np.ndarray      # [n, |C|] float32, rows sum to 1
    log_probs: np.ndarray  # natural log of probs


def _layer_norm(x, gamma, beta, eps):
    mean = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    return (x - mean) / np.sqrt(var + eps) * gamma + beta


def _gelu(x):
    # erf-exact form, not the tanh approximation.
    return 0.5 * x * (1.0 + erf(x / math.sqrt(2.0)))


def _softmax(x):
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def forward(config, weights, pinyin_ids, trace=None):
    """Full-precision float32 encoder pass over one sequence.

    ``trace``, when given a dict, receives ``attention``: a list with one
    [heads, n, n] row-stochastic array per layer.
    """
    n = len(pinyin_ids)
    if n == 0:
        raise EmptyInput("cannot run the encoder on an empty sequence")
    if n > config.max_len:
        raise SequenceTooLong(
            f"sequence length {n} exceeds max_len {config.max_len}")
    for tid in pinyin_ids:
        if not 0 <= tid < config.pinyin_vocab_size:
            raise InvalidTokenId(
                f"pinyin id {tid} outside [0, {config.pinyin_vocab_size})")

    h = config.hidden_size
    heads = config.num_heads
    dh = h // heads
    eps = config.layernorm_epsilon

    ids = np.asarray(pinyin_ids, dtype=np.int64)
    x = weights["token_embedding"][ids] + weights["position_embedding"][:n]
    x = _layer_norm(x, weights["embeddings.layernorm.gamma"],
                    weights["embeddings.layernorm.beta"], eps)

    if trace is not None:
        trace["attention"] = []

    for i in range(config.num_layers):
        base = f"layers.{i}"
        q = x @ weights[f"{base}.attention.query.weight"] \
            + weights[f"{base}.attention.query.bias"]
        k = x @ weights[f"{base}.attention.key.weight"] \
            + weights[f"{base}.attention.key.bias"]
        v = x @ weights[f"{base}.attention.value.weight"] \
            + weights[f"{base}.attention.value.bias"]
        # [n, H] -> [heads, n, dh]
        q = q.reshape(n, heads, dh).transpose(1, 0, 2)
        k = k.reshape(n, heads, dh).transpose(1, 0, 2)
        v = v.reshape(n, heads, dh).transpose(1, 0, 2)
        scores = (q @ k.transpose(0, 2, 1)) * (1.0 / math.sqrt(dh))
        attn = _softmax(scores)
        if trace is not None:
            trace["attention"].append(attn)
        ctx = (attn @ v).transpose(1, 0, 2).reshape(n, h)
        out = ctx @ weights[f"{base}.attention.output.weight"] \
            + weights[f"{base}.attention.output.bias"]
        x = _layer_norm(x + out, weights[f"{base}.attention.layernorm.gamma"],
                        weights[f"{base}.attention.layernorm.beta"], eps)

        inner = _gelu(x @ weights[f"{base}.ffn.intermediate.weight"]
                      + weights[f"{base}.ffn.intermediate.bias"])
        out = inner @ weights[f"{base}.ffn.output.weight"] \
            + weights[f"{base}.ffn.output.bias"]
        x = _layer_norm(x + out, weights[f"{base}.ffn.layernorm.gamma"],
                        weights[f"{base}.ffn.layernorm.beta"], eps)

    logits = x @ weights["classifier.weight"] + weights["classifier.bias"]
    probs = _softmax(logits)
    return EmissionMatrix(n=n, probs=probs, log_probs=np.log(probs))


class PertModel:
    """Loaded weights plus the dictionary that maps syllables to ids."""

    def __init__(self, config, weights, char_dict):
        self.config = config
        self.weights = weights
        self.char_dict = char_dict

    @classmethod
    def load(cls, path, char_dict):
        config, weights = load_weights(path, char_dict)
        return cls(config, weights, char_dict)

    def emission(self, pinyin):
        """Distributions for a syllable sequence; unknowns map to the unk id."""
        ids = [self.char_dict.syllable_id(s) for s in pinyin]
        return forward(self.config, self.weights, ids)
