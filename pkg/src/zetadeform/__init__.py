"""Exact and certified evaluation of rational deformations of multiple
zeta-star values, their limit maps, and the associated fractal sets."""

from .cache import ENGINE_VERSION
from .compositions import Composition, Tail, TailSpec, lex_compare, ones, tau, tau_inverse, twos
from .deform_map import (
    Gn_value,
    Hn_value,
    JumpSite,
    bilipschitz_ratio,
    eta_tail,
    fn_enclosure,
    fn_preimage,
    hn_value,
    order_witness_search,
)
from .enclosure import Enclosure
from .exact_deform import tn_bruteforce, tn_exact
from .fractal import box_count_dim, cantor_points, e2_points, hn_image_sample, moran_solve
from .series import CertifiedSeries, PipelinePlan, Seed, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "ENGINE_VERSION",
    "Composition",
    "Tail",
    "TailSpec",
    "lex_compare",
    "ones",
    "tau",
    "tau_inverse",
    "twos",
    "Gn_value",
    "Hn_value",
    "JumpSite",
    "bilipschitz_ratio",
    "eta_tail",
    "fn_enclosure",
    "fn_preimage",
    "hn_value",
    "order_witness_search",
    "Enclosure",
    "tn_bruteforce",
    "tn_exact",
    "box_count_dim",
    "cantor_points",
    "e2_points",
    "hn_image_sample",
    "moran_solve",
    "CertifiedSeries",
    "PipelinePlan",
    "Seed",
    "run_pipeline",
]
