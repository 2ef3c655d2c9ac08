"""Exact semi-infinite variations of Hodge structure over the rationals."""

from .cli import dump_spec, parse_spec, run
from .deformation import DgLieAlgebra, gauge_action, normalize_unit, solve_mc
from .dgbv import (DgbvAlgebra, check_dgbv_axioms, check_manin, check_module_axioms,
                   check_odd_lie, cohomology, derived_bracket, dgbv_module)
from .errors import SemiInfError
from .frobenius import frobenius, verify_frobenius
from .kahler_ops import KahlerData, build_model_A, build_model_B, verify_lemma_342
from .mirror import FlatTorusPair, verify_intertwining, verify_mirror_theorem
from .models import BUILTINS, builtin
from .vhs import build_filtrations, period_map

__all__ = [
    "BUILTINS", "DgLieAlgebra", "DgbvAlgebra", "FlatTorusPair", "KahlerData", "SemiInfError",
    "build_filtrations", "build_model_A", "build_model_B", "builtin", "check_dgbv_axioms",
    "check_manin", "check_module_axioms", "check_odd_lie", "cohomology", "derived_bracket",
    "dgbv_module", "dump_spec", "frobenius", "gauge_action", "normalize_unit", "parse_spec",
    "period_map", "run", "solve_mc", "verify_frobenius", "verify_intertwining",
    "verify_lemma_342", "verify_mirror_theorem",
]
