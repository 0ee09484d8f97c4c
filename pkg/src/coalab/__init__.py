"""Concurrence of assistance and LOCC distillation for 2 x 2 x n pure states."""

from .decompositions import Ensemble, canonical_decomposition, equal_concurrence_decomposition, realize_by_measurement
from .errors import CoalabError
from .locc import KrausSet, ProtocolNode, run_protocol
from .measures import coa, coa_value, concurrence_mixed, concurrence_pure, tangle3
from .monogamy import ckw_slack, dual_slack, scan, wclass_state
from .states import TripartiteState, entanglement_swap_state, ghz, partial_trace, w_state
from .transforms import (class_a_membership, deterministic_feasible, distill_probability_general,
                         slice_basis, max_distill_probability, nielsen_feasible, vidal_probability)

__version__ = "0.1.0"
