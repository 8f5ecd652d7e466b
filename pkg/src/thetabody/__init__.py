"""Generalized Lovasz theta bodies and their duality relations."""
from .graph import Graph, GraphError, parse_dimacs, complement, alpha
from .cones import AdjacencyCone, Variant, BaseCone, Verdict, cone_for_variant, delta_dual
from .corners import CornerOracle, antiblocker, gauge, min_max_ratio
from .theta import (certify_all_thetas, theta1, theta2, theta3, theta4,
                    theta_abl, ThetaCertificate)
from .stabrelax import stab_oracle, qstab_oracle, frac_oracle, chi_fractional

__version__ = "0.1.0"

__all__ = [
    "Graph", "GraphError", "parse_dimacs", "complement", "alpha",
    "AdjacencyCone", "Variant", "BaseCone", "Verdict", "cone_for_variant", "delta_dual",
    "CornerOracle", "antiblocker", "gauge", "min_max_ratio",
    "certify_all_thetas", "theta1", "theta2", "theta3", "theta4", "theta_abl",
    "ThetaCertificate",
    "stab_oracle", "qstab_oracle", "frac_oracle", "chi_fractional",
]
