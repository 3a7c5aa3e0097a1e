"""Abelian-group structure algebra: normal forms, tensor/Tor, Künneth homology."""

from .groups import (AbelianGroup, CaseRow, abelian_groups_of_order, case_table, direct_sum, homology,
                     homology_series, structure_of_subgroup, tensor, tor)
from .howell import Cokernel, HowellBasis, UnstableModulus, howell_reduce_stream
from .smith import MapError, integer_echelon, kernel_of_map, quotient_by, smith_form, smith_invariants
from .sparse import ReductionResult, StructuredReducer

__all__ = [
    "AbelianGroup", "CaseRow", "abelian_groups_of_order", "case_table", "direct_sum", "homology",
    "homology_series", "structure_of_subgroup", "tensor", "tor", "Cokernel", "HowellBasis",
    "UnstableModulus", "howell_reduce_stream", "MapError", "integer_echelon", "kernel_of_map",
    "quotient_by", "smith_form", "smith_invariants", "ReductionResult", "StructuredReducer",
]
