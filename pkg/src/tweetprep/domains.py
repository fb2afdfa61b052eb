"""Registrable-domain extraction against a bundled public-suffix snapshot.

``extract_domain("https://sub.example.co.uk/p?q=1")`` returns ``"example"``:
the single host label directly left of the public suffix, with scheme,
``www.`` prefix, port, and path removed.  Hosts the snapshot cannot split
(single labels, bare public suffixes, IPv4 addresses) raise
:class:`DomainUnparseable`; callers normally fall back to the literal host.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .errors import DomainUnparseable

_SNAPSHOT_RESOURCE = "public_suffixes.txt"


class SuffixRules:
    """Parsed public-suffix rule set (plain, wildcard, and exception rules)."""

    def __init__(self, lines):
        self.plain: set[tuple[str, ...]] = set()
        self.wildcard: set[tuple[str, ...]] = set()
        self.exception: set[tuple[str, ...]] = set()
        for raw in lines:
            rule = raw.strip().lower()
            if not rule or rule.startswith("//"):
                continue
            if rule.startswith("!"):
                self.exception.add(tuple(rule[1:].split(".")))
            elif rule.startswith("*."):
                self.wildcard.add(tuple(rule[2:].split(".")))
            else:
                self.plain.add(tuple(rule.split(".")))

    def suffix_length(self, labels: list[str]) -> int:
        """Number of trailing labels forming the public suffix.

        Exception rules win; otherwise the longest matching rule; otherwise
        the default rule "*" (the last label alone).
        """
        lowered = tuple(lab.lower() for lab in labels)
        for n in range(len(lowered), 0, -1):
            if lowered[-n:] in self.exception:
                return n - 1
        best = 1
        for n in range(1, len(lowered) + 1):
            tail = lowered[-n:]
            if tail in self.plain:
                best = max(best, n)
            # wildcard rule *.x means any single label under x is a suffix
            if n >= 2 and tail[1:] in self.wildcard:
                best = max(best, n)
        return best


@lru_cache(maxsize=1)
def bundled_rules() -> SuffixRules:
    text = resources.files("tweetprep.data").joinpath(_SNAPSHOT_RESOURCE).read_text("utf-8")
    return SuffixRules(text.splitlines())


def host_of(url: str) -> str:
    """Strip scheme, userinfo, www. prefix, port, path/query/fragment."""
    rest = url
    lower = rest.lower()
    for scheme in ("https://", "http://"):
        if lower.startswith(scheme):
            rest = rest[len(scheme):]
            break
    for stop in ("/", "?", "#"):
        cut = rest.find(stop)
        if cut != -1:
            rest = rest[:cut]
    if "@" in rest:
        rest = rest.rsplit("@", 1)[1]
    if ":" in rest:
        rest = rest.split(":", 1)[0]
    if rest.lower().startswith("www.") and len(rest) > 4:
        rest = rest[4:]
    return rest.rstrip(".")


def extract_domain(url: str, rules: SuffixRules | None = None) -> str:
    """Return the registrable-domain label of a URL.

    Raises DomainUnparseable when the host has no label left of its public
    suffix.  Case of the returned label is preserved as written.
    """
    host = host_of(url)
    if not host:
        raise DomainUnparseable(f"no host in {url!r}")
    labels = host.split(".")
    if any(not lab for lab in labels):
        raise DomainUnparseable(f"empty label in host {host!r}")
    if all(lab.isdigit() for lab in labels):
        raise DomainUnparseable(f"numeric host {host!r}")
    if rules is None:
        rules = bundled_rules()
    n_suffix = rules.suffix_length(labels)
    if n_suffix >= len(labels):
        raise DomainUnparseable(f"host {host!r} is a bare public suffix")
    return labels[len(labels) - n_suffix - 1]
