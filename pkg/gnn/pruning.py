"""
Globalne przycinanie wag według wartości bezwzględnej
"""
import copy
import logging
import math
from typing import List, Tuple

import numpy as np
import torch
from torch import nn

logger = logging.getLogger(__name__)


def prunable_parameters(model: nn.Module) -> List[Tuple[str, nn.Parameter]]:
    """Macierze wag w kolejności state_dict (biasy i skalar eps nie są wagami)"""
    return [(name, param) for name, param in model.named_parameters() if param.ndim >= 2]


def weight_count(model: nn.Module) -> int:
    return sum(param.numel() for _, param in prunable_parameters(model))


def zero_fraction(model: nn.Module) -> float:
    total = weight_count(model)
    zeros = sum(int((param == 0).sum()) for _, param in prunable_parameters(model))
    return zeros / total if total else 0.0


def prune(model: nn.Module, ratio: float) -> nn.Module:
    """
    Wyzeruj floor(ratio * W) wag o najmniejszym |w| w całym modelu

    Remisy rozstrzyga pozycja w spłaszczonej liście wag (kolejność state_dict).
    Zwraca nowy model; wejściowy pozostaje nietknięty.
    """
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"prune ratio must lie in [0, 1], got {ratio}")
    pruned = copy.deepcopy(model)
    params = prunable_parameters(pruned)
    if not params:
        return pruned

    flat = np.concatenate([param.detach().abs().reshape(-1).double().numpy() for _, param in params])
    k = math.floor(ratio * flat.size)
    drop = np.zeros(flat.size, dtype=bool)
    drop[np.argsort(flat, kind="stable")[:k]] = True

    offset = 0
    with torch.no_grad():
        for _, param in params:
            size = param.numel()
            keep = torch.from_numpy(~drop[offset:offset + size]).reshape(param.shape)
            param.mul_(keep.to(param.dtype))
            offset += size
    logger.debug(f"Przycięto {k} z {flat.size} wag (ratio={ratio})")
    return pruned
