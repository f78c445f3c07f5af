"""Deterministic synthetic derivation corpora for two daughter languages.

Words are drawn from a small feature space (tone, initial, nucleus, coda).
Each language owns an ordered list of rules with feature conditions; a
word's derivation is the list of rules whose condition holds, in order.
A minority of words receive an exception: a rule applied out of order
(``[A]`` moved to the end), a rule that failed to apply (``[!A]``), or an
unexplained change (``[t4]``).
"""
from __future__ import annotations

import random
from typing import Callable, Dict, List, NamedTuple, Tuple

TONES = (1, 2, 3, 4)
INITIALS = ("p", "t", "k", "b", "d", "g", "m", "n", "s", "h")
NUCLEI = ("a", "i", "u", "o", "e")
CODAS = ("", "p", "t", "k", "m", "n", "ng")

_VOICELESS = set("ptksh")
_VOICED_OBSTRUENT = set("bdg")
_SONORANT = set("mn")


class Word(NamedTuple):
    initial: str
    nucleus: str
    coda: str
    tone: int

    @property
    def form(self) -> str:
        return f"*{self.initial}{self.nucleus}{self.coda}{self.tone}"

    @property
    def voiceless(self) -> bool:
        return self.initial in _VOICELESS

    @property
    def stopped(self) -> bool:
        return self.coda in ("p", "t", "k")


Rule = Tuple[str, Callable[[Word], bool]]

NORTHERN: List[Rule] = [
    ("t1-split", lambda w: w.tone == 1),
    ("devoice", lambda w: w.initial in _VOICED_OBSTRUENT),
    ("t4-tripart", lambda w: w.tone == 4 and w.voiceless),
    ("coda-loss", lambda w: w.stopped),
    ("raise-u", lambda w: w.nucleus == "o"),
    ("diphthong-u", lambda w: w.nucleus in ("o", "u") and w.coda == ""),
    ("raise-i", lambda w: w.nucleus == "e"),
    ("apocope", lambda w: w.coda == "m"),
    ("palatal", lambda w: w.initial in ("k", "h") and w.nucleus in ("i", "e")),
    ("chamel", lambda w: w.nucleus in ("a", "e", "o")),
]

SOUTHERN: List[Rule] = [
    ("t1-split", lambda w: w.tone == 1),
    ("t4-split", lambda w: w.tone == 4),
    ("devoice", lambda w: w.initial in _VOICED_OBSTRUENT),
    ("spirant", lambda w: w.initial == "k" and w.tone != 3),
    ("x-weak", lambda w: w.initial in ("k", "h") and w.nucleus != "i"),
    ("ac-split", lambda w: w.tone == 4 and w.voiceless and w.nucleus == "a"),
    ("break-c", lambda w: w.nucleus in ("i", "u") and w.coda == ""),
    ("lower-e", lambda w: w.nucleus == "e" and w.coda != ""),
    ("y-fuse", lambda w: w.nucleus == "e" and w.initial in _SONORANT),
]

ALLOPHONIC: Dict[str, List[str]] = {
    "northern": ["chamel"],
    "southern": ["break-c", "y-fuse"],
}

LANGUAGES = {"northern": NORTHERN, "southern": SOUTHERN}

_GLOSSES = ("all", "pinch", "exactly", "river", "stone", "hand", "rain", "fire",
            "road", "hill", "seed", "bird", "fish", "moon", "salt", "wind")


def _lexicon(rng: random.Random, size: int) -> List[Word]:
    # a skewed draw keeps some feature combinations frequent, as in a real lexicon
    weights = [6, 5, 4, 3, 2, 2, 2, 1, 1, 1]
    return [Word(rng.choices(INITIALS, weights)[0],
                 rng.choices(NUCLEI, [5, 4, 3, 2, 2])[0],
                 rng.choices(CODAS, [6, 2, 2, 2, 1, 2, 2])[0],
                 rng.choice(TONES)) for _ in range(size)]


def derive(word: Word, rules: List[Rule], rng: random.Random,
           exception_rate: float) -> List[str]:
    applied = [name for name, cond in rules if cond(word)]
    if rng.random() >= exception_rate:
        return applied
    kind = rng.choice(("late", "missing", "unexplained"))
    if kind == "late" and len(applied) >= 2:
        i = rng.randrange(len(applied) - 1)
        rule = applied.pop(i)
        return applied + [f"[{rule}]"]
    if kind == "missing":
        skipped = [name for name, _ in rules if name not in applied]
        if skipped:
            return applied + [f"[!{rng.choice(skipped)}]"]
    return applied + ["[t4]"]


def generate(language: str, size: int = 300, seed: int = 4021,
             exception_rate: float = 0.08) -> str:
    """Corpus text in the five-column TSV format."""
    rules = LANGUAGES[language]
    rng = random.Random(seed)
    words = _lexicon(rng, size)
    rng = random.Random(f"{seed}-{language}")
    lines = [f"# synthetic {language} corpus: {size} derivations, seed {seed}",
             "# id\tgloss\tparent\tdaughter\trules"]
    for n, w in enumerate(words, start=1):
        seq = derive(w, rules, rng, exception_rate)
        daughter = f"{w.initial}{w.nucleus}{w.coda}"
        lines.append("\t".join([f"{n:04d}", _GLOSSES[n % len(_GLOSSES)], w.form, daughter,
                                "".join(f"{r}:" for r in seq)]))
    return "\n".join(lines) + "\n"


def classification() -> str:
    """Rule classes covering both synthetic languages."""
    lines = ["# rule classes for the synthetic corpora"]
    seen = set()
    for language, rules in LANGUAGES.items():
        for name, _ in rules:
            if name not in seen:
                seen.add(name)
                kind = "allophonic" if name in ALLOPHONIC[language] else "diachronic"
                lines.append(f"{name}\t{kind}")
    return "\n".join(lines) + "\n"


def bundled() -> Dict[str, str]:
    """File name to contents for the corpora shipped in ``pfsa_mml/data``."""
    files = {f"{lang}.tsv": generate(lang) for lang in LANGUAGES}
    files["classes.tsv"] = classification()
    return files


if __name__ == "__main__":
    import sys
    from pathlib import Path

    out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "data")
    for name, text in bundled().items():
        (out / name).write_text(text, encoding="utf-8")
