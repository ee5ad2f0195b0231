"""Exact universality analysis for permutation-invariant networks built from equivariant layers."""
from .errors import EquivcheckError
from .groups import PermGroup, alternating_group, cyclic_group, group_closure, symmetric_group
from .polynomials import MultiPoly, power_of_sum, product_monomial
from .representations import (
    BasisMapFamily, LayerSpace, basis_maps, c1_family, equivariant_hom_basis, hom_dimension,
    layer_conv, layer_full, layer_pointnet, layer_regular, natural_rep, pointnet_family,
    regular_family, regular_rep,
)
from .universality import (
    Status, UniversalityVerdict, compare_classes, decide_polynomial_in_class,
    directional_failure_test, monomial_certificate, normal_subgroup_certificate,
    separation_equivalent,
)

__version__ = "0.1.0"

__all__ = [
    "BasisMapFamily", "EquivcheckError", "LayerSpace", "MultiPoly", "PermGroup", "Status",
    "UniversalityVerdict", "alternating_group", "basis_maps", "c1_family", "compare_classes",
    "cyclic_group", "decide_polynomial_in_class", "directional_failure_test",
    "equivariant_hom_basis", "group_closure", "hom_dimension", "layer_conv", "layer_full",
    "layer_pointnet", "layer_regular", "monomial_certificate", "natural_rep",
    "normal_subgroup_certificate", "pointnet_family", "power_of_sum", "product_monomial",
    "regular_family", "regular_rep", "separation_equivalent", "symmetric_group",
]
