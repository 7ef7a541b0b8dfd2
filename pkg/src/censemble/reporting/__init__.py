from .figures import entropy_table, formfactor_table, framepotential_table
from .writer import (
    build_meta,
    input_hash,
    read_matrix,
    read_matrix_csv,
    write_json,
    write_matrix,
    write_matrix_csv,
    write_table,
)

__all__ = [
    "build_meta",
    "entropy_table",
    "formfactor_table",
    "framepotential_table",
    "input_hash",
    "read_matrix",
    "read_matrix_csv",
    "write_json",
    "write_matrix",
    "write_matrix_csv",
    "write_table",
]
