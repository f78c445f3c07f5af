"""Rule-derivation corpora: parsing, allophonic filtering and symbol encoding.

A derivation is written as a sequence of ``:``-terminated rule tokens::

    t1-split:raise-u:[diphthong-u]:chamel:

``[A]`` marks an exceptional application of ``A`` and ``[!A]`` marks a rule
whose environment was met but which did not apply.  Both spellings are
treated as symbols distinct from the plain rule name.
"""
from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

DELIMITER = "!"
DELIMITER_ID = 0

_RESERVED = frozenset(":[]!")


class CorpusError(ValueError):
    """Base class for corpus and classification parse errors."""


class MalformedSequence(CorpusError):
    def __init__(self, message: str, offset: int, line: Optional[int] = None):
        self.message = message
        self.offset = offset
        self.line = line
        where = f"line {line}, " if line is not None else ""
        super().__init__(f"{where}offset {offset}: {message}")


class MalformedRecord(CorpusError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DuplicateRule(CorpusError):
    pass


class UnknownClass(CorpusError):
    pass


class RuleKind(enum.Enum):
    NORMAL = "normal"
    EXCEPTIONAL = "exceptional"
    NON_APPLICATION = "non-application"


class RuleClass(enum.Enum):
    DIACHRONIC = "diachronic"
    ALLOPHONIC = "allophonic"


def _illegal_char(ch: str) -> bool:
    return ch in _RESERVED or ch.isspace() or unicodedata.category(ch).startswith("C")


@dataclass(frozen=True)
class RuleToken:
    name: str
    kind: RuleKind = RuleKind.NORMAL

    def __post_init__(self):
        if not self.name or any(_illegal_char(c) for c in self.name):
            raise ValueError(f"invalid rule name {self.name!r}")

    @property
    def spelling(self) -> str:
        if self.kind is RuleKind.EXCEPTIONAL:
            return f"[{self.name}]"
        if self.kind is RuleKind.NON_APPLICATION:
            return f"[!{self.name}]"
        return self.name

    @classmethod
    def from_spelling(cls, spelling: str) -> "RuleToken":
        if spelling.startswith("[!") and spelling.endswith("]"):
            return cls(spelling[2:-1], RuleKind.NON_APPLICATION)
        if spelling.startswith("[") and spelling.endswith("]"):
            return cls(spelling[1:-1], RuleKind.EXCEPTIONAL)
        return cls(spelling)

    def __str__(self):
        return self.spelling


@dataclass(frozen=True)
class Derivation:
    id: str
    rules: Tuple[RuleToken, ...] = ()
    gloss: str = ""
    parent_form: str = ""
    daughter_form: str = ""

    @property
    def sequence_text(self) -> str:
        return render_rule_sequence(self.rules)


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def parse_rule_sequence(text: str) -> List[RuleToken]:
    """Parse ``name:[name]:[!name]:`` notation into tokens, in source order.

    Raises :class:`MalformedSequence` with the byte offset of the problem.
    """
    tokens = []
    i, n = 0, len(text)

    def fail(msg, at):
        raise MalformedSequence(msg, _byte_offset(text, at))

    while i < n:
        kind = RuleKind.NORMAL
        if text[i] == "[":
            kind = RuleKind.EXCEPTIONAL
            i += 1
            if i < n and text[i] == "!":
                kind = RuleKind.NON_APPLICATION
                i += 1
            start = i
            while i < n and text[i] != "]":
                if _illegal_char(text[i]):
                    fail(f"illegal character {text[i]!r} in rule name", i)
                i += 1
            if i == n:
                fail("unbalanced '['", i)
            if i == start:
                fail("empty rule name", i)
            name = text[start:i]
            i += 1
            if i == n:
                fail("missing terminal ':'", i)
            if text[i] != ":":
                fail(f"expected ':' after ']', found {text[i]!r}", i)
        else:
            start = i
            while i < n and text[i] != ":":
                if _illegal_char(text[i]):
                    fail(f"illegal character {text[i]!r} in rule name", i)
                i += 1
            if i == start:
                fail("empty rule name", i)
            if i == n:
                fail("missing terminal ':'", i)
            name = text[start:i]
        tokens.append(RuleToken(name, kind))
        i += 1  # the ':'
    return tokens


def render_rule_sequence(tokens: Iterable[RuleToken]) -> str:
    return "".join(f"{t.spelling}:" for t in tokens)


def _records(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, line


def parse_corpus(text: str) -> List[Derivation]:
    """Parse a tab-separated corpus: id, gloss, parent form, daughter form, rules."""
    derivations = []
    for lineno, line in _records(text):
        fields = line.split("\t")
        if len(fields) != 5:
            raise MalformedRecord(f"expected 5 tab-separated fields, found {len(fields)}", lineno)
        ident, gloss, parent, daughter, seq = fields
        try:
            rules = parse_rule_sequence(seq)
        except MalformedSequence as exc:
            raise MalformedSequence(exc.message, exc.offset, line=lineno) from None
        derivations.append(Derivation(ident, tuple(rules), gloss, parent, daughter))
    return derivations


class RuleClassification(dict):
    """Rule name -> :class:`RuleClass`; unlisted rules are diachronic."""

    def __missing__(self, key):
        return RuleClass.DIACHRONIC

    def is_allophonic(self, name: str) -> bool:
        return self[name] is RuleClass.ALLOPHONIC


def parse_classification(text: str) -> RuleClassification:
    classes = RuleClassification()
    for lineno, line in _records(text):
        fields = line.split("\t")
        if len(fields) != 2:
            raise MalformedRecord(f"expected 'rule<TAB>class', found {len(fields)} fields", lineno)
        name, value = fields[0], fields[1].strip()
        try:
            cls = RuleClass(value)
        except ValueError:
            raise UnknownClass(f"line {lineno}: unknown rule class {value!r}") from None
        if name in classes:
            raise DuplicateRule(f"line {lineno}: rule {name!r} classified twice")
        classes[name] = cls
    return classes


def filter_allophonic(derivations: Sequence[Derivation],
                      classes: Dict[str, RuleClass]) -> List[Derivation]:
    """Drop normal applications of allophonic rules.

    Exceptional and non-applied tokens are kept whatever their base rule's class.
    """
    allophonic = {name for name, c in classes.items() if c is RuleClass.ALLOPHONIC}
    out = []
    for d in derivations:
        kept = tuple(t for t in d.rules
                     if t.kind is not RuleKind.NORMAL or t.name not in allophonic)
        out.append(d if len(kept) == len(d.rules) else
                   Derivation(d.id, kept, d.gloss, d.parent_form, d.daughter_form))
    return out


@dataclass
class SymbolTable:
    """Dense ids for token spellings; id 0 is the delimiter ``!``."""

    spellings: List[str] = field(default_factory=lambda: [DELIMITER])

    def __post_init__(self):
        if not self.spellings or self.spellings[0] != DELIMITER:
            raise ValueError("symbol 0 must be the delimiter")
        if len(set(self.spellings)) != len(self.spellings):
            raise ValueError("duplicate symbol spelling")
        self._ids = {s: i for i, s in enumerate(self.spellings)}

    def __len__(self):
        return len(self.spellings)

    def __eq__(self, other):
        return isinstance(other, SymbolTable) and self.spellings == other.spellings

    @property
    def V(self) -> int:
        return len(self.spellings)

    def add(self, spelling: str) -> int:
        if spelling not in self._ids:
            self._ids[spelling] = len(self.spellings)
            self.spellings.append(spelling)
        return self._ids[spelling]

    def id_of(self, spelling: str) -> int:
        return self._ids[spelling]

    def __contains__(self, spelling) -> bool:
        return spelling in self._ids

    def spelling_of(self, ident: int) -> str:
        return self.spellings[ident]

    def decode(self, ids: Iterable[int]) -> List[str]:
        return [self.spellings[i] for i in ids]


def encode(derivations: Iterable[Derivation]) -> Tuple[List[List[int]], SymbolTable]:
    """Map each derivation to symbol ids terminated by the delimiter."""
    table = SymbolTable()
    sequences = []
    for d in derivations:
        seq = [table.add(t.spelling) for t in d.rules]
        seq.append(DELIMITER_ID)
        sequences.append(seq)
    return sequences, table
