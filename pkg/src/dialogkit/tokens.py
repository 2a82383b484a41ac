"""The nine wire-format marker tokens and reserved-literal checks.

Kept in its own module so both the domain types and the codec can depend
on it without importing each other.
"""

from __future__ import annotations

import re
from enum import Enum


class TokenKind(Enum):
    """Marker kinds of the text-to-text wire format."""

    USER = "U"
    AGENT = "A"
    PROGRAM_NAME = "PN"
    PROGRAM_ARG_NAME = "PAN"
    PROGRAM_ARG_VALUE = "PAV"
    PROGRAM_RESPONSE = "PR"
    PROGRAM_RESPONSE_ARG_NAME = "PRAN"
    PROGRAM_RESPONSE_ARG_VALUE = "PRAV"
    CONTEXT = "C"

    @property
    def literal(self) -> str:
        return f"<{self.value}>"


# Fixed literal renderings, in declaration order.
RESERVED_LITERALS: tuple[str, ...] = tuple(kind.literal for kind in TokenKind)

_KIND_BY_NAME = {kind.value: kind for kind in TokenKind}

# A marker candidate is "<" + uppercase ASCII letters + ">".  Only the nine
# names above are valid; any other candidate is rejected by the parser as an
# unknown marker.  "<" followed by anything else is ordinary text.
MARKER_RE = re.compile(r"<([A-Z]+)>")

CONTEXT_LITERAL = TokenKind.CONTEXT.literal


def lookup_kind(name: str) -> TokenKind | None:
    """Return the TokenKind for a marker name, or None if unknown."""
    return _KIND_BY_NAME.get(name)


def contains_reserved_literal(text: str) -> bool:
    """True if any of the nine marker literals occurs in *text*."""
    return any(lit in text for lit in RESERVED_LITERALS)


def find_reserved_literal(text: str) -> str | None:
    """Return the first reserved literal occurring in *text*, if any."""
    for lit in RESERVED_LITERALS:
        if lit in text:
            return lit
    return None


def contains_marker_candidate(text: str) -> bool:
    """True if *text* contains anything the lexer would treat as a marker.

    Broader than contains_reserved_literal: also catches unknown uppercase
    candidates such as "<XYZ>", which would fail to round-trip through the
    codec even though they are not reserved literals.
    """
    return MARKER_RE.search(text) is not None
