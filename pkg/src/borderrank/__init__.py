"""Exact construction of GL(V)-invariant tensors from partition pairs and
certification of tensor border rank lower bounds via Koszul and Young
flattenings, decomposition verification, and the (210) apolarity test."""

from .partitions import (
    Partition,
    dim_schur,
    add_cell,
    pieri_expand,
    lr_multiplicities,
    enumerate_ssyt,
    predicted_generic_rank,
    parse_partition,
    format_partition,
)
from .exactlin import ExactMatrix, Cyc3, ZETA, rank_exact, rank_mod_p, kernel_basis
from .schur import (
    TableauVector,
    straighten,
    weight,
    raising_action,
    lowering_action,
    gl_action,
    pieri_project,
    highest_weight_vector,
)
from .tensorspace import (
    InvariantTensor,
    LinearMatrixSpace,
    build_tensor,
    build_skew_tensor,
    constant_rank_check,
    conciseness_check,
)
from .flatten import (
    koszul_matrix,
    koszul_blocks,
    young_matrix,
    young_blocks,
    koszul_bound,
    young_bound,
    restricted_koszul_bound,
    predicted_koszul_rank,
    multiplicity_comparison,
    square_flattening_check,
)
from .decomp import (
    CurveDecomposition,
    verify_border_decomposition,
    verify_rank_decomposition,
    skew_difference_decomposition,
    skew_upper_decomposition,
    cartan_decomposition,
    builtin_decomposition,
)
from .apolarity import (
    run_210_test,
    verify_stated_spaces,
    skew_threshold_analysis,
    dual_module_poset,
    skew_complement_poset,
)

__version__ = "0.1.0"
