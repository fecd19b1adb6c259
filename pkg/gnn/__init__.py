"""
Pakiet GNN: warstwy GraphSAGE/GAT/GIN, trening indukcyjny, przycinanie i format modelu
"""
from .config import Architecture, GnnConfig
from .layers import NeighborBlock, sample_neighbors, SageLayer, GatLayer, GinLayer, layer_forward
from .model import GnnModel, build_model, forward, full_forward, predict_labels, evaluate
from .training import TrainReport, train, fine_tune
from .pruning import prune, weight_count, zero_fraction
from .serialization import model_to_bytes, model_from_bytes, save_model, load_model

__all__ = [
    'Architecture',
    'GnnConfig',
    'NeighborBlock',
    'sample_neighbors',
    'SageLayer',
    'GatLayer',
    'GinLayer',
    'layer_forward',
    'GnnModel',
    'build_model',
    'forward',
    'full_forward',
    'predict_labels',
    'evaluate',
    'TrainReport',
    'train',
    'fine_tune',
    'prune',
    'weight_count',
    'zero_fraction',
    'model_to_bytes',
    'model_from_bytes',
    'save_model',
    'load_model'
]
