"""Axioms, subadditive-limit estimation and vanishing certificates."""

from .axioms import AxiomReport, LengthFunctionSpec, check_axioms, zero_length
from .certificates import (CertificateBuilder, CertStep, Inequality, VanishingCertificate,
                           VerifyReport, derive_torsion_zero, verify_certificate)
from .families import Family, make_family
from .fekete import FeketeResult, SubadditiveSeries, fekete_upper_bounds

__all__ = [
    "AxiomReport", "LengthFunctionSpec", "check_axioms", "zero_length",
    "CertificateBuilder", "CertStep", "Inequality", "VanishingCertificate", "VerifyReport",
    "derive_torsion_zero", "verify_certificate", "Family", "make_family",
    "FeketeResult", "SubadditiveSeries", "fekete_upper_bounds",
]
