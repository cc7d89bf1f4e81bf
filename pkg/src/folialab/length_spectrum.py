"""Conjugacy-class census, marked length spectra and domination reports."""

from __future__ import annotations

import csv
import enum
import io
import json
import warnings
from dataclasses import dataclass

from .moebius import translation_length
from .surface_rep import Representation, Word, evaluate, format_word

SOFT_MAX_LEN = 12
HARD_MAX_LEN = 16
EXCLUSION_FLOOR = 1e-9


def _letter_key(x: int) -> tuple[int, int]:
    # a1 < A1 < b1 < B1 < ...
    return (abs(x), 0 if x > 0 else 1)


def _word_key(w) -> tuple:
    return tuple(_letter_key(x) for x in w)


def canonical_form(w: Word) -> Word:
    """Least rotation of ``w`` or of its inverse, in (letter order) lex order."""
    w = w.cyclic_reduction()
    n = len(w)
    if n == 0:
        return w
    candidates = []
    for v in (tuple(w), tuple(w.inverse())):
        for i in range(n):
            candidates.append(v[i:] + v[:i])
    return Word(min(candidates, key=_word_key))


@dataclass(frozen=True)
class ClassCensus:
    genus: int
    max_len: int
    classes: tuple[Word, ...]

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)


def enumerate_classes(genus: int, max_len: int) -> ClassCensus:
    """All nontrivial cyclic words up to ``max_len``, modulo rotation and inversion.

    Classes are ordered by length, then lexicographically with
    a1 < A1 < b1 < B1 < a2 < ...
    """
    if max_len < 1 or max_len > HARD_MAX_LEN:
        raise ValueError(f"max_len must lie in [1, {HARD_MAX_LEN}], got {max_len}")
    if max_len > SOFT_MAX_LEN:
        warnings.warn(f"census of length {max_len} is very large", RuntimeWarning, stacklevel=2)
    letters = sorted((s * i for i in range(1, 2 * genus + 1) for s in (1, -1)), key=_letter_key)
    classes: list[Word] = []

    for n in range(1, max_len + 1):
        for first in letters:
            k0 = _letter_key(first)
            # every letter and its inverse must not undercut the first letter,
            # otherwise a rotation of the word or its inverse is smaller
            allowed = [x for x in letters if _letter_key(x) >= k0 and _letter_key(-x) >= k0]
            if first not in allowed:
                continue
            stack = [(first,)]
            while stack:
                w = stack.pop()
                if len(w) == n:
                    if n > 1 and w[0] == -w[-1]:
                        continue
                    word = Word(w)
                    if canonical_form(word) == word:
                        classes.append(word)
                    continue
                for x in allowed:
                    if x != -w[-1]:
                        stack.append(w + (x,))
    classes.sort(key=lambda w: (len(w), _word_key(w)))
    return ClassCensus(genus, max_len, tuple(classes))


def marked_length(rep: Representation, w) -> float:
    return translation_length(evaluate(rep, w))


def marked_spectrum(rep: Representation, census: ClassCensus) -> list[float]:
    return [marked_length(rep, w) for w in census]


class Verdict(enum.Enum):
    DOMINATED_AT_CENSUS = "DominatedAtCensus"
    NOT_DOMINATED = "NotDominated"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DominationReport:
    kappa_hat: float
    worst_class: Word
    census_size: int
    excluded: int
    verdict: Verdict
    rows: tuple[tuple[Word, float, float, float], ...] = ()

    def to_dict(self) -> dict:
        return {
            "kappa_hat": self.kappa_hat,
            "worst_class": format_word(self.worst_class),
            "census_size": self.census_size,
            "excluded": self.excluded,
            "verdict": self.verdict.value,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["class", "l_rho", "l_hol", "ratio"])
        for w, lr, lh, ratio in self.rows:
            writer.writerow([format_word(w), repr(lr), repr(lh), "" if ratio is None else repr(ratio)])
        return buf.getvalue()


def domination_report(rho: Representation, hol: Representation, max_len: int,
                      census: ClassCensus | None = None) -> DominationReport:
    """Ratio sup of hol lengths over rho lengths on a finite census.

    Classes with rho-length below ``EXCLUSION_FLOOR`` are counted in
    ``excluded`` and carry no ratio.
    """
    if rho.genus != hol.genus:
        raise ValueError(f"genus mismatch: {rho.genus} vs {hol.genus}")
    census = census or enumerate_classes(rho.genus, max_len)
    kappa, worst, excluded = -1.0, Word(), 0
    rows = []
    for w in census:
        lr = marked_length(rho, w)
        lh = marked_length(hol, w)
        if lr < EXCLUSION_FLOOR:
            excluded += 1
            rows.append((w, lr, lh, None))
            continue
        ratio = lh / lr
        rows.append((w, lr, lh, ratio))
        if ratio > kappa:
            kappa, worst = ratio, w
    kappa = max(kappa, 0.0)
    if kappa >= 1.0:
        verdict = Verdict.NOT_DOMINATED
    elif kappa < 1.0 - 1e-9 and excluded == 0:
        verdict = Verdict.DOMINATED_AT_CENSUS
    else:
        verdict = Verdict.INCONCLUSIVE
    return DominationReport(kappa, worst, len(census), excluded, verdict, tuple(rows))
