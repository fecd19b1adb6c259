"""
Pakiet odcisku: wektory odległości, zbiór treningowy, C_sim i werdykty
"""
from .distance import PairLabel, DistanceVector, distance_vector, distance_matrix, euclidean_distances
from .training_set import (
    ModelKind,
    FingerprintTrainingSet,
    build_training_set,
    build_robust_training_set
)
from .csim import SimilarityClassifier, train_csim
from .verify import Verdict, VerdictReport, verdict_from_decisions, verify, verify_embeddings

__all__ = [
    'PairLabel',
    'DistanceVector',
    'distance_vector',
    'distance_matrix',
    'euclidean_distances',
    'ModelKind',
    'FingerprintTrainingSet',
    'build_training_set',
    'build_robust_training_set',
    'SimilarityClassifier',
    'train_csim',
    'Verdict',
    'VerdictReport',
    'verdict_from_decisions',
    'verify',
    'verify_embeddings'
]
