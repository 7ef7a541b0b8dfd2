from .tensors import (
    ComplexMatrix,
    EigenSystem,
    HermitianOperator,
    RealArray,
    StructureKind,
    as_complex_matrix,
    check_cap,
    copy_tensor,
    eigh,
    kron,
    max_norm,
    partial_trace,
    permutation_matrix,
    s_tensor,
    structure_operator,
    swap,
    twofold_dim,
)

__all__ = [
    "ComplexMatrix",
    "EigenSystem",
    "HermitianOperator",
    "RealArray",
    "StructureKind",
    "as_complex_matrix",
    "check_cap",
    "copy_tensor",
    "eigh",
    "kron",
    "max_norm",
    "partial_trace",
    "permutation_matrix",
    "s_tensor",
    "structure_operator",
    "swap",
    "twofold_dim",
]
