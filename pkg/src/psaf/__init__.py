"""Argumentation with collective attacks over inconsistent rule-based knowledge
bases, with dialogue trees as explanations."""

from .arguments import Argument, Psaf, build_psaf, enumerate_arguments, enumerate_attacks
from .dialogue import Content, Dialogue, DialogueTree, Utterance, build_tree, check_properties
from .logic import KnowledgeBase, closure, enumerate_mcs, load_kb, mcs_query, parse_kb, parse_literal
from .semantics import accepted, enumerate_extensions, grounded_extension
from .strategy import classify_success, from_abstract, generate_dialogue, to_abstract

__all__ = [
    "Argument",
    "Content",
    "Dialogue",
    "DialogueTree",
    "KnowledgeBase",
    "Psaf",
    "Utterance",
    "accepted",
    "build_psaf",
    "build_tree",
    "check_properties",
    "classify_success",
    "closure",
    "enumerate_arguments",
    "enumerate_attacks",
    "enumerate_extensions",
    "enumerate_mcs",
    "from_abstract",
    "generate_dialogue",
    "grounded_extension",
    "load_kb",
    "mcs_query",
    "parse_kb",
    "parse_literal",
    "to_abstract",
]
