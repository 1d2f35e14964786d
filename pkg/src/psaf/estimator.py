"""scikit-learn style wrapper: fit on a knowledge base, predict query answers."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .arguments import build_psaf
from .logic import KnowledgeBase, load_kb, mcs_query, parse_kb
from .semantics import accepted
from .strategy import GeneratedDialogue, generate_dialogue

_ACCEPTANCE = {"possible": "credulous", "plausible": "sceptical", "surest": "grounded"}
_REPAIRS = {"possible": "some", "plausible": "all", "surest": "intersection"}


def check_kb(X) -> KnowledgeBase:
    """Accept a KnowledgeBase, a path to a ``.kb`` file or KB source text."""
    if isinstance(X, KnowledgeBase):
        return X
    if isinstance(X, Path) or (isinstance(X, str) and "\n" not in X and X.endswith(".kb")):
        return load_kb(X)
    if isinstance(X, str):
        return parse_kb(X)
    raise TypeError(f"expected a KnowledgeBase, a .kb path or KB text, got {type(X).__name__}")


def check_queries(kb: KnowledgeBase, queries) -> list:
    if isinstance(queries, str):
        queries = [queries]
    out = []
    for q in queries:
        phi = kb.lookup(q) if isinstance(q, str) else q
        if not getattr(phi, "is_ground", True):
            raise ValueError(f"query {q!r} is not ground")
        out.append(phi)
    return out


class PsafReasoner(BaseEstimator):
    """Answer ground queries over an inconsistent knowledge base.

    ``mode`` is one of possible / plausible / surest; ``semantics`` picks the
    extension family used for possible and plausible answers. With
    ``explain=True`` every positive answer is backed by a generated dialogue,
    available through :meth:`explain_query`.
    """

    def __init__(self, mode: str = "possible", semantics: str = "preferred", explain: bool = False):
        self.mode = mode
        self.semantics = semantics
        self.explain = explain

    def _validate_params(self) -> None:
        if self.mode not in _ACCEPTANCE:
            raise ValueError(f"mode must be one of {sorted(_ACCEPTANCE)}, got {self.mode!r}")
        if self.semantics not in ("admissible", "preferred", "stable"):
            raise ValueError(f"unsupported semantics {self.semantics!r}")

    def fit(self, X, y=None):
        self._validate_params()
        self.kb_ = check_kb(X)
        self.af_ = build_psaf(self.kb_)
        self.n_arguments_ = len(self.af_.arguments)
        return self

    def _sem(self) -> str:
        return "preferred" if self.semantics == "admissible" else self.semantics

    def _success_kind(self) -> str:
        acceptance = _ACCEPTANCE[self.mode]
        return self._sem() if acceptance == "credulous" else acceptance

    def predict(self, queries) -> np.ndarray:
        check_is_fitted(self, "af_")
        acceptance = _ACCEPTANCE[self.mode]
        answers = []
        for phi in check_queries(self.kb_, queries):
            if self.explain:
                g = self.explain_query(phi)
                answers.append(g is not None and self._success_kind() in g.classification)
            else:
                answers.append(accepted(self.af_, phi, acceptance, self._sem()).accepted)
        return np.array(answers, dtype=bool)

    def predict_repairs(self, queries) -> np.ndarray:
        """Same answers computed from maximal consistent subsets."""
        check_is_fitted(self, "af_")
        return np.array(
            [mcs_query(self.kb_, phi, _REPAIRS[self.mode]) for phi in check_queries(self.kb_, queries)],
            dtype=bool,
        )

    def explain_query(self, query) -> GeneratedDialogue | None:
        check_is_fitted(self, "af_")
        (phi,) = check_queries(self.kb_, [query])
        acceptance = _ACCEPTANCE[self.mode]
        sem = "grounded" if acceptance == "grounded" else self._sem()
        return generate_dialogue(self.kb_, phi, acceptance, sem, af=self.af_)
