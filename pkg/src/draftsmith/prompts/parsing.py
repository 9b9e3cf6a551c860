"""Turn completion text back into names, field phrases, types, and method names.

Every parser here is total: bad input degrades to an empty or fallback value
plus a diagnostic, never an exception. The grammar is deliberately narrow
(the enumeration sentences the prompt primers teach) with just enough slack
for the variation a greedy completion produces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from typing import Any, Optional

from ..model import PRIMITIVES, FieldType, Multiplicity, canonical_method_name, canonical_name

ARTICLES = ("a ", "an ", "the ")
_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NAME_LIST_MARKER = re.compile(r"the following tables\s*:", re.IGNORECASE)
_FIELD_MARKER = re.compile(r"\b(?:might have|has)\b", re.IGNORECASE)
_METHOD_MARKER = re.compile(r"method names are\s*:", re.IGNORECASE)


@dataclass
class Diagnostic:
    code: str
    message: str


@dataclass
class ParseResult:
    """A parsed value plus any diagnostics produced along the way."""

    value: Any
    diagnostics: list[Diagnostic] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diagnostics


@dataclass
class FieldPhrase:
    """One item of a field enumeration, e.g. "a list of assignments"."""

    raw: str
    name: str
    multiplicity: Multiplicity


def singularize(word: str) -> str:
    """Naive suffix singularization; irregular plurals pass through untouched."""
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith(("sses", "xes", "zes", "ches", "shes")):
        return word[:-2]
    if word.endswith("ss"):
        return word
    if word.endswith("s") and len(word) > 1:
        return word[:-1]
    return word


def pluralize(word: str) -> str:
    if word.endswith("y") and len(word) > 1 and word[-2] not in "aeiou":
        return word[:-1] + "ies"
    if word.endswith(("s", "x", "z", "ch", "sh")):
        return word + "es"
    return word + "s"


def _split_article(phrase: str) -> tuple[Optional[str], str]:
    for art in ARTICLES:
        if phrase.startswith(art):
            return art.strip(), phrase[len(art):].lstrip()
    return None, phrase


def _head_is_plural(phrase: str) -> bool:
    head = phrase.split()[-1] if phrase.split() else ""
    return head.endswith("s") and not head.endswith("ss")


def _singularize_head(phrase: str) -> str:
    words = phrase.split()
    if not words:
        return phrase
    words[-1] = singularize(words[-1])
    return " ".join(words)


def pluralize_head(phrase: str) -> str:
    words = phrase.split()
    if not words:
        return phrase
    words[-1] = pluralize(words[-1])
    return " ".join(words)


def normalize_name(raw: str) -> str:
    """Canonicalize a noun phrase into a stored component name.

    Lowercases and collapses whitespace, strips a leading article and
    "list of" wrapper plus trailing punctuation, and singularizes the head
    noun of phrases that read as plural.
    """
    text = canonical_name(raw).strip("\"'")
    text = text.rstrip(".,;:!?").rstrip()
    article, rest = _split_article(text)
    plural = False
    if rest.startswith("list of "):
        rest = rest[len("list of "):].lstrip()
        # inner article: "a list of the customers"
        _, rest = _split_article(rest)
        plural = True
    elif article is None and _head_is_plural(rest):
        plural = True
    if plural:
        rest = _singularize_head(rest)
    return rest.strip()


def infer_multiplicity(raw: str) -> Multiplicity:
    """Many for "list of" phrases and bare plurals; a leading article means one."""
    text = canonical_name(raw).rstrip(".,;:!?")
    article, rest = _split_article(text)
    if rest.startswith("list of ") or rest == "list of":
        return Multiplicity.MANY
    if article is not None:
        return Multiplicity.ONE
    if _head_is_plural(rest):
        return Multiplicity.MANY
    return Multiplicity.ONE


def split_enumeration(text: str) -> list[str]:
    """Split "a, b, and c" style enumerations, tolerating a missing Oxford comma."""
    items: list[str] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        for conj in ("and ", "or "):
            if chunk.startswith(conj):
                chunk = chunk[len(conj):].strip()
        if not chunk:
            continue
        parts = re.split(r"\s+(?:and|or)\s+", chunk)
        items.extend(p.strip() for p in parts if p.strip())
    return items


def _strip_answer_prefix(line: str) -> str:
    line = line.strip()
    if line[:2].upper() == "A:":
        line = line[2:].lstrip()
    return line


def _last_line(text: str) -> str:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    return lines[-1] if lines else ""


def parse_name_list(completion: str) -> ParseResult:
    """Extract object names from a "…the following tables: a, b, c." completion."""
    matches = list(_NAME_LIST_MARKER.finditer(completion))
    if not matches:
        return ParseResult([], [Diagnostic("no_list_found", "no table-list marker in completion")])
    tail = completion[matches[-1].end():]
    tail = tail.splitlines()[0] if tail.splitlines() else ""
    names = []
    for item in split_enumeration(tail.strip().rstrip(".")):
        name = normalize_name(item)
        if name:
            names.append(name)
    diags = [] if names else [Diagnostic("empty_list", "table-list marker with no names")]
    return ParseResult(names, diags)


def parse_field_phrases(completion: str) -> ParseResult:
    """Extract field phrases from a "A pet has a name, …" style completion."""
    line = _strip_answer_prefix(_last_line(completion))
    matches = list(_FIELD_MARKER.finditer(line))
    if not matches:
        return ParseResult(
            [], [Diagnostic("no_list_found", "no has/might-have marker in completion")]
        )
    tail = line[matches[-1].end():].strip().rstrip(".")
    phrases: list[FieldPhrase] = []
    for item in split_enumeration(tail):
        name = normalize_name(item)
        if not name:
            continue
        phrases.append(FieldPhrase(raw=item, name=name, multiplicity=infer_multiplicity(item)))
    diags = [] if phrases else [Diagnostic("empty_list", "field enumeration was empty")]
    return ParseResult(phrases, diags)


def parse_type_answer(completion: str, vocabulary: list[str]) -> ParseResult:
    """Match a one-word type answer against the offered vocabulary.

    Known primitive names parse as primitives even when the vocabulary omitted
    them; anything else out of vocabulary falls back to string with a
    low-confidence diagnostic.
    """
    answer = canonical_name(_strip_answer_prefix(_last_line(completion))).rstrip(".").strip("\"'")
    vocab = {canonical_name(v): v for v in vocabulary}
    if answer in PRIMITIVES:
        return ParseResult(FieldType.prim(answer))
    if answer in vocab:
        return ParseResult(FieldType.ref(vocab[answer]))
    return ParseResult(
        FieldType.prim("string"),
        [Diagnostic("low_confidence", f"type answer {answer!r} not in vocabulary")],
    )


def parse_method_names(completion: str) -> ParseResult:
    """Extract method names from a "The method names are: …" line or a bare list."""
    matches = list(_METHOD_MARKER.finditer(completion))
    if matches:
        tail = completion[matches[-1].end():]
        tail = tail.splitlines()[0] if tail.splitlines() else ""
    else:
        tail = _strip_answer_prefix(_last_line(completion))
    names: list[str] = []
    diags: list[Diagnostic] = []
    for item in split_enumeration(tail.strip().rstrip(".")):
        name = canonical_method_name(item)
        if _IDENTIFIER.fullmatch(name):
            names.append(name)
        elif name:
            diags.append(Diagnostic("dropped_item", f"not a method name: {item!r}"))
    if not names:
        diags.append(Diagnostic("empty_list", "no method names in completion"))
    return ParseResult(names, diags)


def _name_variants(name: str) -> set[str]:
    canon = canonical_name(name)
    return {canon, _singularize_head(canon), pluralize_head(canon)}


def dedupe_names(candidates: list[str], existing: list[str]) -> list[str]:
    """Drop candidates already present (or present as a naive plural/singular
    variant) among the existing names, and within the candidate list itself.

    Candidates are expected to be parser output, so beyond whitespace/case
    canonicalization they pass through unchanged; re-running the plural
    heuristics here would mangle names like species.
    """
    taken: set[str] = set()
    for name in existing:
        taken |= _name_variants(name)
    kept: list[str] = []
    for cand in candidates:
        variants = _name_variants(cand)
        if variants & taken:
            continue
        kept.append(canonical_name(cand))
        taken |= variants
    return kept


# vowel-initial words pronounced with a leading consonant sound ("a user"),
# and consonant-initial words with a silent h ("an hour")
_A_PREFIXES = ("uni", "use", "usa", "usu", "ute", "uti", "euro", "ewe", "one", "once")
_AN_PREFIXES = ("hour", "honest", "honor", "heir")


def indefinite_article(noun: str) -> str:
    word = noun.split()[0].lower() if noun.split() else ""
    if word.startswith(_A_PREFIXES):
        return "a"
    if word.startswith(_AN_PREFIXES) or word[:1] in "aeiou":
        return "an"
    return "a"


_indefinite = indefinite_article


def tables_sentence(names: list[str]) -> str:
    """The app-level context sentence used ahead of table questions."""
    return "The app has the following tables: " + ", ".join(names) + "."


def describe_object(obj: Any) -> str:
    """Render one object as the enumeration sentence the field parsers accept."""
    name = obj.name
    head = f"{_indefinite(name)} {name} has".capitalize()
    fields = obj.active_fields()
    if not fields:
        return f"{head} nothing yet."
    phrases = []
    for f in fields:
        if f.multiplicity is Multiplicity.MANY:
            phrases.append(f"a list of {pluralize_head(f.name)}")
        else:
            phrases.append(f"{_indefinite(f.name)} {f.name}")
    if len(phrases) == 1:
        body = phrases[0]
    elif len(phrases) == 2:
        body = f"{phrases[0]} and {phrases[1]}"
    else:
        body = ", ".join(phrases[:-1]) + f", and {phrases[-1]}"
    return f"{head} {body}."


def describe_app(model: Any) -> str:
    """Serialize a model for prompt context: the table list while names are being
    drafted, per-object descriptions once fields exist."""
    objects = model.active_objects()
    if any(o.active_fields() for o in objects):
        return " ".join(describe_object(o) for o in objects)
    return tables_sentence([o.name for o in objects])


def methods_sentence(object_name: str, method_names: list[str]) -> str:
    listed = ", ".join(f"{m}()" for m in method_names)
    return f"The {object_name} object has the following methods: {listed}."
