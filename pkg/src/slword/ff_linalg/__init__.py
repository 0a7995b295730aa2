"""Exact linear algebra over prime fields F_p."""

from .field import PrimeField, is_prime
from .matrix import GFMatrix, RrefResult, as_residues, unit_vector, vec
from .maps import (
    AffineSet,
    pick_in_coset_avoiding,
    sl_from_basis_images,
    sl_map_frame,
    sl_map_vector,
    solve_block_map,
    solve_linear,
)
from .subspace import Subspace, complete_to_basis, project_head, project_tail

__all__ = [
    "AffineSet",
    "GFMatrix",
    "PrimeField",
    "RrefResult",
    "Subspace",
    "as_residues",
    "complete_to_basis",
    "is_prime",
    "pick_in_coset_avoiding",
    "project_head",
    "project_tail",
    "sl_from_basis_images",
    "sl_map_frame",
    "sl_map_vector",
    "solve_block_map",
    "solve_linear",
    "unit_vector",
    "vec",
]
