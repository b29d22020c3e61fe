"""qbflab: proof checking, strategy extraction and cost/capacity oracles for QBF."""

from .core import QCNF, Block, parse_qdimacs, write_qdimacs, restrict_clause, restrict_qcnf, eval_matrix
from .errors import FormatError, FormulaTrueError, OracleScaleError, ProofError, QBFError
from .generators import gen_equality, gen_kbkf, gen_kbkf_doubled, gen_kbkf_weak, gen_random_q
from .semantics import truth, cost, synthesize_winning_forall, verify_strategy

__version__ = "0.1.0"

__all__ = [
    "QCNF",
    "Block",
    "parse_qdimacs",
    "write_qdimacs",
    "restrict_clause",
    "restrict_qcnf",
    "eval_matrix",
    "QBFError",
    "FormatError",
    "FormulaTrueError",
    "OracleScaleError",
    "ProofError",
    "gen_equality",
    "gen_kbkf",
    "gen_kbkf_doubled",
    "gen_kbkf_weak",
    "gen_random_q",
    "truth",
    "cost",
    "synthesize_winning_forall",
    "verify_strategy",
]
