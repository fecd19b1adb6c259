"""
Pakiet ataków: wyrocznie zapytań, ekstrakcja Type I/II, podwójna ekstrakcja, przesunięcie rozkładu
"""
from .oracle import QueryOracle, InProcessOracle, HttpOracle, answer_query, encode_query, decode_query
from .extraction import (
    AttackType,
    AttackConfig,
    SurrogateModel,
    row_21_loss,
    attack_structure,
    run_extraction,
    double_extract,
    chain_extraction
)
from .distribution_shift import (
    Discriminator,
    GaussianScreen,
    gaussian_screen,
    train_discriminator,
    distribution_shift_attack
)

__all__ = [
    'QueryOracle',
    'InProcessOracle',
    'HttpOracle',
    'answer_query',
    'encode_query',
    'decode_query',
    'AttackType',
    'AttackConfig',
    'SurrogateModel',
    'row_21_loss',
    'attack_structure',
    'run_extraction',
    'double_extract',
    'chain_extraction',
    'Discriminator',
    'GaussianScreen',
    'gaussian_screen',
    'train_discriminator',
    'distribution_shift_attack'
]
