"""Social-media entity detection and rewriting.

Six entity kinds are detected in raw tweet text and rewritten into a
reserved-token scheme, preserving all other text byte for byte:

    mention   @foo          ->  @user
    hashtag   #foo          ->  <hashtag> foo </hashtag>
    cashtag   $foo          ->  <cashtag> foo </cashtag>
    emoji     (U+1F917)     ->  <emoji> hugging_face </emoji>
    url       www.foo.com   ->  <http> foo </http>
    email     info@foo.com  ->  <email>

Detection precedence is url > email > mention > cashtag > hashtag > emoji
(emails contain ``@``; URLs may contain ``#`` and ``@``); each kind matches
leftmost-longest within the text left unclaimed by stronger kinds.  The
rewrite is idempotent: emitted tags and the literal ``@user`` replacement
are never matched again, and a re-scan of normalized output finds no
entities.

Patterns (the sharp edges, all deliberate):

* mentions are ``@`` + ASCII word characters; the exact token ``@user`` is
  exempt so normalization is a fixed point;
* hashtags are ``#`` + Unicode letters/digits (Turkish letters included,
  underscore excluded);
* cashtags are ``$`` + one to six ASCII letters, not followed by a seventh;
* URLs require a scheme or a ``www.`` prefix, so the host part of an email
  never double-matches as a URL;
* case is preserved everywhere; there is no lowercasing step, so dotted and
  dotless "i" never get conflated.  Anyone adding a lowercase option must
  handle Turkish casing explicitly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .domains import DomainUnparseable, extract_domain, host_of

ENTITY_KINDS = ("mention", "hashtag", "cashtag", "emoji", "url", "email")

MENTION_TOKEN = "@user"
EMAIL_TOKEN = "<email>"
UNKNOWN_EMOJI_NAME = "unk_emoji"

# The nine reserved entity tokens, in the fixed id order used by the tokenizer.
ENTITY_TOKENS = (
    MENTION_TOKEN,
    "<hashtag>", "</hashtag>",
    "<cashtag>", "</cashtag>",
    "<emoji>", "</emoji>",
    "<http>", "</http>",
)

_URL_CHARS = r"A-Za-z0-9\-._~:/?#\[\]@!$&'()*+,;=%"
_URL_RE = re.compile(r"(?<![\w@.])(?:https?://|www\.)[" + _URL_CHARS + r"]+")
_URL_TRAILING = ".,;:!?'\")"
_EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")
_MENTION_RE = re.compile(r"@[A-Za-z0-9_]+")
_CASHTAG_RE = re.compile(r"\$[A-Za-z]{1,6}(?![A-Za-z])")
_HASHTAG_RE = re.compile(r"#[^\W_]+", re.UNICODE)

_VS16 = "️"
_ZWJ = "‍"
_SKIN_TONES = frozenset(chr(c) for c in range(0x1F3FB, 0x1F400))
# Fallback detection ranges for pictographs absent from the lexicon; plain
# arrows and letterlike symbols stay out so ordinary text is never touched.
_PICTO_RANGES = (
    (0x231A, 0x231B),
    (0x23E9, 0x23FA),
    (0x2600, 0x27BF),
    (0x2934, 0x2935),
    (0x2B00, 0x2BFF),
    (0x3030, 0x303D),
    (0x3297, 0x3299),
    (0x1F000, 0x1FAFF),
)


def _is_pictographic(ch: str) -> bool:
    cp = ord(ch)
    for lo, hi in _PICTO_RANGES:
        if lo <= cp <= hi:
            return True
    return False


@dataclass(frozen=True)
class RawTweet:
    """One input record: opaque id, Unicode text, and the retweet flag."""

    id: str
    text: str
    is_retweet: bool = False


@dataclass(frozen=True)
class EntitySpan:
    """A detected entity: character offsets into the raw text plus payload.

    The payload is the extracted inner text: hashtag/cashtag body, emoji
    name, URL domain; empty for mentions and emails.
    """

    kind: str
    start: int
    end: int
    payload: str = ""


@dataclass(frozen=True)
class NormalizedText:
    """Rewritten tweet text plus the source spans that produced it."""

    text: str
    spans: tuple[EntitySpan, ...]
    source_id: str = ""


class EmojiLexicon:
    """Immutable emoji-sequence -> snake_case-name table.

    Lookup is total over the bundled table and partial over user extensions;
    user entries override bundled ones.  The lexicon also owns the matching
    machinery (a prefix trie plus a start-character regex) used to find
    emoji sequences in text, so it is built once and shared across threads.
    """

    def __init__(self, entries: dict[str, str]):
        self._names = dict(entries)
        self._trie: dict = {}
        starts: set[str] = set()
        for seq in self._names:
            node = self._trie
            for ch in seq:
                node = node.setdefault(ch, {})
            node[None] = seq
            starts.add(seq[0])
        for lo, hi in _PICTO_RANGES:
            starts.add(chr(lo))
        self._start_re = _compile_start_class(starts)

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, seq: str) -> bool:
        return seq in self._names

    def name(self, seq: str) -> str | None:
        return self._names.get(seq)

    @classmethod
    def bundled(cls) -> "EmojiLexicon":
        return _bundled_lexicon()

    @classmethod
    def from_file(cls, path, extend_bundled: bool = True) -> "EmojiLexicon":
        """Load a two-column tab-separated lexicon file (emoji<TAB>name)."""
        entries: dict[str, str] = {}
        if extend_bundled:
            entries.update(_bundled_lexicon()._names)
        with open(path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2 or not parts[0]:
                    raise ValueError(f"{path}:{lineno}: expected 'emoji<TAB>name'")
                entries[parts[0]] = parts[1]
        return cls(entries)

    def iter_matches(self, text: str):
        """Yield (start, end, name) for each emoji sequence in text."""
        last_end = 0
        for m in self._start_re.finditer(text):
            i = m.start()
            if i < last_end:
                continue
            end = self._match_one(text, i)
            if end > i:
                yield i, end, self._resolve_name(text[i:end])
                last_end = end

    def _match_one(self, text: str, i: int) -> int:
        """Length of the emoji sequence starting at i (0 if none).

        Greedy: longest trie match, else a single pictographic codepoint;
        then trailing skin-tone modifiers / VS16; then ZWJ-joined repeats.
        """
        end = self._match_base(text, i)
        if end == i:
            return i
        n = len(text)
        while True:
            while end < n and (text[end] in _SKIN_TONES or text[end] == _VS16):
                end += 1
            if end < n - 1 and text[end] == _ZWJ:
                nxt = self._match_base(text, end + 1)
                if nxt > end + 1:
                    end = nxt
                    continue
            break
        return end

    def _match_base(self, text: str, i: int) -> int:
        node = self._trie
        best = i
        j = i
        n = len(text)
        while j < n:
            node = node.get(text[j])
            if node is None:
                break
            j += 1
            if None in node:
                best = j
        if best > i:
            return best
        if _is_pictographic(text[i]):
            return i + 1
        return i

    def _resolve_name(self, seq: str) -> str:
        name = self._names.get(seq)
        if name is not None:
            return name
        stripped = seq.replace(_VS16, "")
        name = self._names.get(stripped)
        if name is not None:
            return name
        base = stripped.rstrip("".join(_SKIN_TONES)) or stripped
        return self._names.get(base, UNKNOWN_EMOJI_NAME)


def _compile_start_class(chars: set[str]) -> re.Pattern:
    """Compile a [..] character class covering chars plus fallback ranges."""
    ranges = [[lo, hi] for lo, hi in _PICTO_RANGES]
    ranges.extend([ord(c), ord(c)] for c in chars)
    ranges.sort()
    merged: list[list[int]] = []
    for r in ranges:
        if merged and r[0] <= merged[-1][1] + 1:
            merged[-1][1] = max(merged[-1][1], r[1])
        else:
            merged.append(r)
    parts = []
    for lo, hi in merged:
        if lo == hi:
            parts.append(re.escape(chr(lo)))
        else:
            parts.append(f"{re.escape(chr(lo))}-{re.escape(chr(hi))}")
    return re.compile("[" + "".join(parts) + "]")


@lru_cache(maxsize=1)
def _bundled_lexicon() -> EmojiLexicon:
    entries: dict[str, str] = {}
    text = resources.files("tweetprep.data").joinpath("emoji_lexicon.tsv").read_text("utf-8")
    for line in text.splitlines():
        if not line:
            continue
        seq, name = line.split("\t")
        entries[seq] = name
    return EmojiLexicon(entries)


def emoji_name(seq: str, lexicon: EmojiLexicon | None = None) -> str:
    """Name for an emoji sequence: user lexicon, bundled table, or fallback."""
    lex = lexicon if lexicon is not None else EmojiLexicon.bundled()
    name = lex.name(seq)
    if name is not None:
        return name
    if lexicon is not None:
        bundled = EmojiLexicon.bundled().name(seq)
        if bundled is not None:
            return bundled
    return UNKNOWN_EMOJI_NAME


def _url_payload(raw_url: str) -> str:
    try:
        return extract_domain(raw_url)
    except DomainUnparseable:
        return host_of(raw_url) or raw_url


def _unclaimed_segments(text: str, occupied: bytearray):
    """Maximal (offset, substring) runs not yet claimed by an entity."""
    n = len(text)
    i = 0
    while i < n:
        if occupied[i]:
            i += 1
            continue
        j = i
        while j < n and not occupied[j]:
            j += 1
        yield i, text[i:j]
        i = j


def scan_entities(text: str, lexicon: EmojiLexicon | None = None) -> list[EntitySpan]:
    """Detect all entities in text, sorted by start, non-overlapping.

    Precedence url > email > mention > cashtag > hashtag > emoji; within a
    kind, leftmost-longest.  Each kind scans only the text left unclaimed
    by higher-precedence kinds, so a candidate partially covered by a
    stronger entity can still match within the remaining gap (this is what
    makes normalization idempotent on adversarial juxtapositions).  The
    literal token ``@user`` is never reported as a mention.
    """
    if not text:
        return []
    occupied = bytearray(len(text))
    spans: list[EntitySpan] = []

    def claim(kind: str, start: int, end: int, payload: str = "") -> None:
        if end <= start:
            return
        for i in range(start, end):
            occupied[i] = 1
        spans.append(EntitySpan(kind, start, end, payload))

    for off, seg in list(_unclaimed_segments(text, occupied)):
        for m in _URL_RE.finditer(seg):
            trimmed = m.group().rstrip(_URL_TRAILING)
            if trimmed:
                claim("url", off + m.start(), off + m.start() + len(trimmed),
                      _url_payload(trimmed))
    for off, seg in list(_unclaimed_segments(text, occupied)):
        for m in _EMAIL_RE.finditer(seg):
            claim("email", off + m.start(), off + m.end())
    for off, seg in list(_unclaimed_segments(text, occupied)):
        for m in _MENTION_RE.finditer(seg):
            if m.group() != MENTION_TOKEN:
                claim("mention", off + m.start(), off + m.end())
    for off, seg in list(_unclaimed_segments(text, occupied)):
        for m in _CASHTAG_RE.finditer(seg):
            claim("cashtag", off + m.start(), off + m.end(), m.group()[1:])
    for off, seg in list(_unclaimed_segments(text, occupied)):
        for m in _HASHTAG_RE.finditer(seg):
            claim("hashtag", off + m.start(), off + m.end(), m.group()[1:])
    lex = lexicon if lexicon is not None else EmojiLexicon.bundled()
    for off, seg in list(_unclaimed_segments(text, occupied)):
        for start, end, name in lex.iter_matches(seg):
            claim("emoji", off + start, off + end, name)

    spans.sort(key=lambda s: s.start)
    return spans


def replacement_for(span: EntitySpan) -> str:
    """The rewritten text for one entity span."""
    kind = span.kind
    if kind == "mention":
        return MENTION_TOKEN
    if kind == "hashtag":
        return f"<hashtag> {span.payload} </hashtag>"
    if kind == "cashtag":
        return f"<cashtag> {span.payload} </cashtag>"
    if kind == "emoji":
        return f"<emoji> {span.payload} </emoji>"
    if kind == "url":
        return f"<http> {span.payload} </http>"
    if kind == "email":
        return EMAIL_TOKEN
    raise ValueError(f"unknown entity kind {kind!r}")


def normalize_tweet(tweet: RawTweet, lexicon: EmojiLexicon | None = None) -> NormalizedText:
    """Rewrite all detected entities; non-entity text is preserved verbatim.

    Whitespace outside spans is never collapsed, and consecutive mentions
    each produce their own ``@user``.
    """
    spans = scan_entities(tweet.text, lexicon)
    if not spans:
        return NormalizedText(tweet.text, (), tweet.id)
    parts: list[str] = []
    cursor = 0
    for span in spans:
        parts.append(tweet.text[cursor:span.start])
        parts.append(replacement_for(span))
        cursor = span.end
    parts.append(tweet.text[cursor:])
    return NormalizedText("".join(parts), tuple(spans), tweet.id)
