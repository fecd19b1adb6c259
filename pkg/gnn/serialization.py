"""
Kanoniczny, jednoplikowy format modelu (z jego bajtów liczona jest commitment w rejestrze)

Układ: b"GRVM" | wersja (uint32 LE) | długość nagłówka (uint32 LE) | nagłówek JSON (UTF-8,
posortowane klucze) | wagi float32 LE w kolejności tabeli tensorów.
"""
import json
import logging
import os
import struct
from typing import Dict, Any, List

import numpy as np
import torch
from torch import nn

from core.exceptions import ModelFormatError
from .config import GnnConfig
from .model import GnnModel

logger = logging.getLogger(__name__)

MAGIC = b"GRVM"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<4sII")


def _post_layer_spec(layer: nn.Module) -> Dict[str, Any]:
    if not isinstance(layer, nn.Linear):
        raise ModelFormatError(f"cannot serialize output transform of type {type(layer).__name__}")
    return {"in_dim": layer.in_features, "out_dim": layer.out_features, "bias": layer.bias is not None}


def model_header(model: GnnModel) -> Dict[str, Any]:
    return {
        "config": model.config.to_dict(),
        "in_dim": model.in_dim,
        "num_classes": model.num_classes,
        "post_layers": [_post_layer_spec(layer) for layer in model.post],
        "tensors": [{"name": name, "shape": list(t.shape)} for name, t in model.state_dict().items()],
    }


def model_to_bytes(model: GnnModel) -> bytes:
    """Serializuj model do kanonicznych bajtów (identyczny model -> identyczne bajty)"""
    header = json.dumps(model_header(model), sort_keys=True, separators=(",", ":")).encode("utf-8")
    payload = b"".join(
        np.ascontiguousarray(t.detach().cpu().numpy(), dtype="<f4").tobytes()
        for t in model.state_dict().values()
    )
    return _PREFIX.pack(MAGIC, FORMAT_VERSION, len(header)) + header + payload


def _set_tensor(model: nn.Module, name: str, value: torch.Tensor) -> None:
    """Wstaw tensor pod nazwą z tabeli, także gdy kształt różni się od konfiguracji"""
    *path, leaf = name.split(".")
    module = model
    for part in path:
        module = getattr(module, part)
    current = getattr(module, leaf)
    if current.shape == value.shape:
        with torch.no_grad():
            current.copy_(value)
    else:
        setattr(module, leaf, nn.Parameter(value))


def model_from_bytes(blob: bytes) -> GnnModel:
    """
    Odtwórz model z bajtów

    Rozbieżność kształtów z konfiguracją nie jest błędem formatu: taki model
    wczytuje się, a wykrywa go kontrola poprawności budowy.
    """
    if not blob:
        raise ModelFormatError("empty model bytes")
    if len(blob) < _PREFIX.size:
        raise ModelFormatError("truncated model header")
    magic, version, header_len = _PREFIX.unpack_from(blob)
    if magic != MAGIC:
        raise ModelFormatError("not a model container (bad magic)")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {version}")
    start = _PREFIX.size
    try:
        header = json.loads(blob[start:start + header_len].decode("utf-8"))
        config = GnnConfig.from_dict(header["config"])
        model = GnnModel(config, int(header["in_dim"]), int(header["num_classes"]))
        for spec in header["post_layers"]:
            model.post.append(nn.Linear(spec["in_dim"], spec["out_dim"], bias=spec["bias"]))
        tensors: List[Dict[str, Any]] = header["tensors"]
    except (ValueError, KeyError, TypeError) as e:
        raise ModelFormatError(f"invalid model header: {e}")

    offset = start + header_len
    expected_names = set(model.state_dict().keys())
    seen = set()
    for entry in tensors:
        try:
            name, shape = str(entry["name"]), tuple(int(s) for s in entry["shape"])
        except (ValueError, KeyError, TypeError) as e:
            raise ModelFormatError(f"invalid tensor table entry {entry!r}: {e}")
        if any(s < 0 for s in shape):
            raise ModelFormatError(f"negative dimension in tensor {name}")
        if name not in expected_names:
            raise ModelFormatError(f"unknown tensor {name}")
        count = int(np.prod(shape)) if shape else 1
        end = offset + 4 * count
        if end > len(blob):
            raise ModelFormatError("truncated weight payload")
        values = np.frombuffer(blob[offset:end], dtype="<f4").astype(np.float32).reshape(shape)
        _set_tensor(model, name, torch.from_numpy(values.copy()))
        seen.add(name)
        offset = end
    if offset != len(blob):
        raise ModelFormatError("trailing bytes after weight payload")
    if seen != expected_names:
        raise ModelFormatError(f"missing tensors: {sorted(expected_names - seen)}")
    return model


def save_model(model: GnnModel, path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "wb") as f:
        f.write(model_to_bytes(model))
    logger.debug(f"Zapisano model do {path}")
    return path


def load_model(path: str) -> GnnModel:
    with open(path, "rb") as f:
        return model_from_bytes(f.read())
