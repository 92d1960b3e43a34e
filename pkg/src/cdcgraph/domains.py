"""Domain expressions: the context strings that scope every fact and query.

A domain is an ``@``-separated path of segments, most general first, e.g.
``HighSchool@Math@Calculus``.  A segment may fuse several atoms with ``+``
(``product+engineering@mobile``); fusion is order-insensitive, so the
canonical rendering sorts fused atoms lexicographically.

Grammar (exact):

    domain  := segment ('@' segment)*
    segment := atom ('+' atom)*
    atom    := [A-Za-z0-9_][A-Za-z0-9_.\\-]*
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainSyntaxError

_ATOM_START = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_")
_ATOM_CONT = _ATOM_START | set(".-")


@dataclass(frozen=True, eq=False)
class DomainSegment:
    """One path segment: a single atom, or a ``+``-fusion of several.

    ``atoms`` keeps the order in which the atoms were written; equality,
    hashing, and formatting use the canonical (sorted, deduplicated) form,
    since fusion is symmetric.
    """

    atoms: tuple[str, ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("segment needs at least one atom")

    @property
    def canonical_atoms(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.atoms)))

    @property
    def is_fusion(self) -> bool:
        return len(self.canonical_atoms) > 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DomainSegment):
            return NotImplemented
        return self.canonical_atoms == other.canonical_atoms

    def __hash__(self) -> int:
        return hash(self.canonical_atoms)

    def __str__(self) -> str:
        return "+".join(self.canonical_atoms)


@dataclass(frozen=True, eq=False)
class DomainExpr:
    """A parsed domain path, outermost (most general) segment first.

    Immutable value; safe to share and to use as a dict key.
    """

    segments: tuple[DomainSegment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("domain needs at least one segment")

    @property
    def text(self) -> str:
        """Canonical rendering (fusion atoms sorted)."""
        return "@".join(str(seg) for seg in self.segments)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DomainExpr):
            return NotImplemented
        return self.segments == other.segments

    def __hash__(self) -> int:
        return hash(self.segments)

    def __str__(self) -> str:
        return self.text

    def __repr__(self) -> str:
        return f"DomainExpr({self.text!r})"


def parse_domain(text: str) -> DomainExpr:
    """Parse a domain string; raises DomainSyntaxError naming the offset."""
    if not text:
        raise DomainSyntaxError("empty domain", 0)
    segments: list[DomainSegment] = []
    atoms: list[str] = []
    i = 0
    n = len(text)
    while True:
        # one atom must start here; atoms non-empty means we just passed a '+'
        if i >= n:
            raise DomainSyntaxError("empty atom" if atoms else "empty segment", i)
        if text[i] not in _ATOM_START:
            if text[i] == "@":
                raise DomainSyntaxError("empty atom" if atoms else "empty segment", i)
            if text[i] == "+":
                raise DomainSyntaxError("empty atom", i)
            raise DomainSyntaxError(f"illegal character {text[i]!r}", i)
        start = i
        i += 1
        while i < n and text[i] in _ATOM_CONT:
            i += 1
        atoms.append(text[start:i])
        if i >= n:
            segments.append(DomainSegment(tuple(atoms)))
            return DomainExpr(tuple(segments))
        if text[i] == "+":
            i += 1
            continue
        if text[i] == "@":
            segments.append(DomainSegment(tuple(atoms)))
            atoms = []
            i += 1
            continue
        raise DomainSyntaxError(f"illegal character {text[i]!r}", i)


def format_domain(expr: DomainExpr) -> str:
    """Canonical text of a domain expression; inverse of parse_domain."""
    return expr.text


def is_prefix_of(general: DomainExpr, specific: DomainExpr) -> bool:
    """True iff ``general``'s segments are a leading sublist of ``specific``'s."""
    g, s = general.segments, specific.segments
    return len(g) <= len(s) and s[: len(g)] == g


def fuse(d1: DomainExpr, d2: DomainExpr) -> DomainExpr:
    """Fuse two domains into a single fusion segment; commutative.

    Single-segment inputs contribute their atoms directly.  A multi-segment
    input is flattened to one opaque atom first ('@'/'+' become '.', keeping
    the result inside the domain grammar).
    """

    def head_atoms(d: DomainExpr) -> tuple[str, ...]:
        if len(d.segments) == 1:
            return d.segments[0].canonical_atoms
        return (d.text.replace("@", ".").replace("+", "."),)

    merged = tuple(sorted(set(head_atoms(d1)) | set(head_atoms(d2))))
    return DomainExpr((DomainSegment(merged),))
