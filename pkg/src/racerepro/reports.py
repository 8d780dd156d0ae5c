"""Bug-report ingestion and the shared text-preprocessing pipeline.

Every retrieval stage consumes token streams produced here.  The pipeline
is the classic four-step normalization: lowercase/tokenize, stop-word
removal, C reserved-word removal (for source text), Porter stemming.
Stop-word and reserved-word lists are bundled data files so results are
bit-reproducible.

Report input formats:

* plain text: first line ``Subject: <text>``, a blank line, then the body;
* structured JSON with fields ``{id, subject, body}``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .stem import stem

TokenStream = list[str]

MODE_TEXT = "natural-language"
MODE_C_SOURCE = "c-source"

_WORD_RE = re.compile(r"[A-Za-z0-9_]+")
_CAMEL_RE = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z0-9]*|[a-z0-9]+")
_SENTENCE_RE = re.compile(r"[.?!]+")


class ReportFormatError(ValueError):
    """Raised when a report file does not match the documented input format."""


def _load_wordlist(name: str) -> frozenset[str]:
    text = (resources.files("racerepro") / "data" / name).read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


STOP_WORDS = _load_wordlist("stopwords.txt")
C_RESERVED_WORDS = _load_wordlist("c_reserved.txt")


# --- tokenization -----------------------------------------------------------

def split_identifier(token: str) -> list[str]:
    """Split a compound identifier on underscores and camelCase boundaries."""
    parts: list[str] = []
    for chunk in token.split("_"):
        parts.extend(_CAMEL_RE.findall(chunk))
    return parts


def tokenize(text: str, split_compounds: bool = True) -> TokenStream:
    """Lowercased word tokens, split on non-alphanumeric except underscore.

    Compound identifiers (``copy_internal``, ``readFile``) are kept whole and
    additionally emitted as sub-tokens, bridging identifier and prose
    vocabulary.  ``split_compounds=False`` yields raw word tokens only, which
    is what exact-match scans (syscall mention counting) want.
    """
    tokens: TokenStream = []
    for match in _WORD_RE.finditer(text):
        raw = match.group()
        tokens.append(raw.lower())
        if split_compounds:
            parts = split_identifier(raw)
            if len(parts) >= 2:
                tokens.extend(part.lower() for part in parts)
    return tokens


def preprocess_tokens(tokens: TokenStream, mode: str = MODE_TEXT) -> TokenStream:
    """Normalization stages after tokenization: stop words, reserved words, stem.

    Applying this to its own output is a fixed point (no re-tokenization
    happens here), which the property suite checks over the fixture corpus.
    """
    if mode not in (MODE_TEXT, MODE_C_SOURCE):
        raise ValueError(f"unknown preprocessing mode: {mode!r}")
    out: TokenStream = []
    for tok in tokens:
        if tok in STOP_WORDS:
            continue
        if mode == MODE_C_SOURCE and tok in C_RESERVED_WORDS:
            continue
        out.append(stem(tok))
    return out


def preprocess(text: str, mode: str = MODE_TEXT) -> TokenStream:
    """Full four-step pipeline over raw text."""
    return preprocess_tokens(tokenize(text), mode)


# --- sentence segmentation --------------------------------------------------

def split_sentences(body: str) -> list[str]:
    """Split on sentence delimiters (. ? !); empty segments are dropped.

    Trailing text without a delimiter forms a final sentence.  Abbreviation
    periods over-split; accepted, since downstream mining only needs
    co-mention granularity.
    """
    sentences = []
    for segment in _SENTENCE_RE.split(body):
        segment = segment.strip()
        if segment:
            sentences.append(segment)
    return sentences


# --- report loading ---------------------------------------------------------

@dataclass
class BugReport:
    """A bug report; subject and body are stored unmodified."""

    id: str
    subject: str
    body: str
    sentences: list[str] = field(default_factory=list)

    @classmethod
    def from_parts(cls, id: str, subject: str, body: str) -> "BugReport":
        return cls(id=id, subject=subject, body=body, sentences=split_sentences(body))


def load_report(path: str | Path) -> BugReport:
    """Load a report from plain text (``Subject:`` header) or structured JSON."""
    path = Path(path)
    text = path.read_text("utf-8")
    if path.suffix == ".json":
        try:
            data = json.loads(text)
            report_id = str(data["id"])
            subject = str(data["subject"])
            body = str(data.get("body", ""))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ReportFormatError(f"{path}: malformed structured report: {exc}") from exc
        return BugReport.from_parts(report_id, subject, body)

    first, _, rest = text.partition("\n")
    if not first.startswith("Subject:"):
        raise ReportFormatError(f"{path}: first line must start with 'Subject:'")
    subject = first[len("Subject:"):].strip()
    body = rest.lstrip("\n")
    return BugReport.from_parts(path.stem, subject, body)
