"""
Pakiet z narzędziami pomocniczymi
"""
from .seeding import derive_seed
from .reporting import output_layout, write_table
from .visualization import GraphVisualizer, centroid_distances, overlap_coefficient, project_2d

__all__ = [
    'derive_seed',
    'output_layout',
    'write_table',
    'GraphVisualizer',
    'centroid_distances',
    'overlap_coefficient',
    'project_2d'
]
