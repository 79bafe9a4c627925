"""Modular symbols of weight two cusp forms on Gamma0(N) and their logarithmic growth."""

from .arith import S, T, IDENTITY, BasePoint, GroupElement, TraceClass, classify, distance, distance_gamma_i, mobius, norm
from .cusps import Cusp, CuspClass, TruncationParams, choose_truncation, cusp_classes, enters_horoball
from .errors import MembershipError, ParseError, PrecisionError, ReductionError, ResourceError
from .growth import (
    ExplicitConstants,
    GrowthFit,
    GrowthRecord,
    BoundReport,
    explicit_constants,
    fit_log_bound,
    sample_elements,
    scan,
    verify_lemma2,
)
from .reduction import ReductionResult, reduce
from .symbols import (
    CuspFormSeries,
    SymbolMap,
    build_symbol_map,
    builtin_level11,
    load_series,
    modsym_direct,
    modsym_word,
    period_lattice,
)
from .words import GeneratorTable, SvarcMilnorFit, coset_table, decompose_psl2z, estimate_svarc_milnor, rewrite

__version__ = "0.1.0"

__all__ = [
    "BasePoint",
    "BoundReport",
    "build_symbol_map",
    "builtin_level11",
    "choose_truncation",
    "classify",
    "coset_table",
    "Cusp",
    "cusp_classes",
    "CuspClass",
    "CuspFormSeries",
    "decompose_psl2z",
    "distance",
    "distance_gamma_i",
    "enters_horoball",
    "estimate_svarc_milnor",
    "explicit_constants",
    "ExplicitConstants",
    "fit_log_bound",
    "GeneratorTable",
    "GroupElement",
    "GrowthFit",
    "GrowthRecord",
    "IDENTITY",
    "load_series",
    "MembershipError",
    "mobius",
    "modsym_direct",
    "modsym_word",
    "norm",
    "ParseError",
    "period_lattice",
    "PrecisionError",
    "reduce",
    "ReductionError",
    "ReductionResult",
    "ResourceError",
    "rewrite",
    "S",
    "sample_elements",
    "scan",
    "SvarcMilnorFit",
    "SymbolMap",
    "T",
    "TraceClass",
    "TruncationParams",
    "verify_lemma2",
]
