"""Finite-model verification of chain covering properties for spectral maps."""

from .poset import (
    ChainRecord,
    Cut,
    Poset,
    covering_pairs,
    cuts_of,
    enumerate_chains,
    enumerate_posets,
    height,
    is_chain,
    make_poset,
    maximal_chains,
    random_poset,
)
from .specmap import (
    PROPERTY_NAMES,
    TOP,
    ImageChain,
    SpectralMap,
    check_layer,
    check_property,
    enumerate_monotone_maps,
    image_chain,
    is_cover,
    is_D_chain,
    is_maximal_cover,
    is_maximal_D_chain,
    is_perfect_cover,
    is_unitary,
    make_spectral_map,
    maximal_D_chains,
    properties_summary,
)
from .theorems import (
    CORE_THEOREMS,
    THEOREM_STATEMENTS,
    Counterexample,
    TheoremId,
    Verdict,
    exhaustive_verify,
    verify,
)
from .search import WitnessSearchSpec, search_witness, shrink
from .rings import (
    Ideal,
    Product,
    RingHom,
    Zn,
    check_extension_LO_lemma,
    check_kernel_LO_lemma,
    extension_ideal,
    kernel,
    make_hom,
    preimage_ideal,
    spec,
    to_spectral_map,
)
from .document import (
    InstanceDocument,
    export_dot,
    parse_instance,
    parse_hom_expr,
    parse_ring_expr,
    serialize_instance,
)

__version__ = "0.1.0"

__all__ = [
    "ChainRecord",
    "Cut",
    "Poset",
    "covering_pairs",
    "cuts_of",
    "enumerate_chains",
    "enumerate_posets",
    "height",
    "is_chain",
    "make_poset",
    "maximal_chains",
    "random_poset",
    "PROPERTY_NAMES",
    "TOP",
    "ImageChain",
    "SpectralMap",
    "check_layer",
    "check_property",
    "enumerate_monotone_maps",
    "image_chain",
    "is_cover",
    "is_D_chain",
    "is_maximal_cover",
    "is_maximal_D_chain",
    "is_perfect_cover",
    "is_unitary",
    "make_spectral_map",
    "maximal_D_chains",
    "properties_summary",
    "CORE_THEOREMS",
    "THEOREM_STATEMENTS",
    "Counterexample",
    "TheoremId",
    "Verdict",
    "exhaustive_verify",
    "verify",
    "WitnessSearchSpec",
    "search_witness",
    "shrink",
    "Ideal",
    "Product",
    "RingHom",
    "Zn",
    "check_extension_LO_lemma",
    "check_kernel_LO_lemma",
    "extension_ideal",
    "kernel",
    "make_hom",
    "preimage_ideal",
    "spec",
    "to_spectral_map",
    "InstanceDocument",
    "export_dot",
    "parse_instance",
    "parse_hom_expr",
    "parse_ring_expr",
    "serialize_instance",
    "__version__",
]
