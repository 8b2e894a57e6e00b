"""percolab: a verification lab for bond-percolation correlation inequalities.

Small graphs are checked by exhaustive enumeration; larger ones by seeded,
reproducible Monte Carlo.  See the README for the CLI and file formats.
"""

from .errors import (EvaluationError, EventSyntaxError, GraphFormatError,
                     HypothesisError, MonotonicityError, PercolabError,
                     SizeGuardError, StrategyError)
from .graphs import (Configuration, FaceSet, Graph, clusters, faces, generate,
                     graph_from_spec, parse_graph, same_face)
from .events import (Monotonicity, disjoint_occurrence, evaluate,
                     monotonicity, parse_event, sq_s_occurrence, unparse)
from .strategies import (RunTrace, Strategy, extend_with_rest, make_strategy,
                         parse_strategy, run, splice, verify_continuation)
from .exact import (Joint, SqS, exact_npaths, exact_pair, exact_prob,
                    verify_splice_independence)
from .mc import Estimate, mc_npaths, mc_pair, mc_prob
from .zipper import (BowtieEvent, ConstChoice, DualSpace, GeneralStrategy,
                     ProductEvent, build_preset, check_gen_inequality,
                     check_zipper_condition, gen_enumerate)
from .checks import (CheckReport, alpha3_root, implied_lambda, run_check,
                     scan_conjectures)

__version__ = "0.1.0"
