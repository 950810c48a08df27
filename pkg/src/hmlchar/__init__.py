"""Satisfiability, primality and characteristic formulae for the modal logics
of the simulation-based preorders."""

from .errors import FragmentError, HmlError, ParseError, PreconditionError, ResourceLimit
from .formula import parse_formula, parse_fragment, show
from .lts import parse_process, show_process
from .sat import entails, extract_model, sat_hml
from .semantics import model_check, preorder
from .prime import decide_prime, extract_witness
from .equiv import decide_char_equiv

__all__ = [
    "FragmentError", "HmlError", "ParseError", "PreconditionError", "ResourceLimit",
    "parse_formula", "parse_fragment", "show", "parse_process", "show_process",
    "entails", "extract_model", "sat_hml", "model_check", "preorder",
    "decide_prime", "extract_witness", "decide_char_equiv",
]
