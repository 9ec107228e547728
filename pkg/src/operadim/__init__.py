"""operadim: dimension sequences of quadratic operads with certified modular rank."""

from .certify import RankCertificate, certify_rank, is_prime_u63, select_primes
from .consequences import SparseRowMatrix, expand_consequences, operad_dim_mod_p
from .dual import annihilator, dual_relations, pairing, relation_space
from .identities import (
    Identity,
    linearize,
    parse_identity,
    parse_identity_file,
    preset,
    preset_names,
    validate_multilinear,
)
from .modlinalg import PrimeField, RankConfig, rank_mod_p
from .monomials import Monomial, TreeShape, dim_free, enumerate_shapes
from .series import TruncatedRationalSeries, compose, gk_defect, poincare

__version__ = "0.1.0"

__all__ = [
    "Identity",
    "Monomial",
    "PrimeField",
    "RankCertificate",
    "RankConfig",
    "SparseRowMatrix",
    "TreeShape",
    "TruncatedRationalSeries",
    "annihilator",
    "certify_rank",
    "compose",
    "dim_free",
    "dual_relations",
    "enumerate_shapes",
    "expand_consequences",
    "gk_defect",
    "is_prime_u63",
    "linearize",
    "operad_dim_mod_p",
    "pairing",
    "parse_identity",
    "parse_identity_file",
    "poincare",
    "preset",
    "preset_names",
    "rank_mod_p",
    "relation_space",
    "select_primes",
    "validate_multilinear",
]
