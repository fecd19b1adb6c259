"""
Pakiet z danymi grafowymi: wczytywanie, generowanie, podział i graf kNN
"""
from .graph_dataset import GraphDataset, load_dataset, save_dataset
from .splits import DataSplit, split_dataset
from .synthetic import SyntheticGraphSpec, generate_synthetic, resolve_dataset, NAMED_SPECS
from .knn import knn_graph

__all__ = [
    'GraphDataset',
    'load_dataset',
    'save_dataset',
    'DataSplit',
    'split_dataset',
    'SyntheticGraphSpec',
    'generate_synthetic',
    'resolve_dataset',
    'NAMED_SPECS',
    'knn_graph'
]
