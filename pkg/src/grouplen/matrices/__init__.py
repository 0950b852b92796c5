"""Exact matrix arithmetic and matrix-group length tools."""

from .jordan import EHU, JCDecomposition, ehu_decomposition, jordan_chevalley
from .norms import log_spectral_radius, matrix_length, stable_norm_bounds
from .qmatrix import MatrixFamily, QMatrix, parse_matrix
from .sl2 import SL2Class, orbit_translation_estimate, sl2_classify, translation_length
from .steinberg import elementary_heisenberg_report, steinberg_relation_check
from .unipotent import jordan_type, unipotent_square_conjugator

__all__ = [
    "EHU", "JCDecomposition", "ehu_decomposition", "jordan_chevalley",
    "log_spectral_radius", "matrix_length", "stable_norm_bounds",
    "MatrixFamily", "QMatrix", "parse_matrix",
    "SL2Class", "orbit_translation_estimate", "sl2_classify", "translation_length",
    "elementary_heisenberg_report", "steinberg_relation_check",
    "jordan_type", "unipotent_square_conjugator",
]
