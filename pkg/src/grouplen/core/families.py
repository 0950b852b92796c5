"""Black-box group arithmetic used by the axiom checker, the certificate
verifier and the word-metric BFS.

A family wraps one concrete group (possibly parametrised, e.g. by the matrix
of a semidirect product) and knows how to multiply, invert and compare its
elements, and how to move them to and from canonical strings.  Symbols
``l(g)`` in certificates are keyed by these canonical strings.
"""

from __future__ import annotations

from ..errors import UnknownFamilyError


class Family:
    tag = "abstract"

    def params(self) -> dict:
        return {}

    def identity(self):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def parse(self, s: str):
        raise NotImplementedError

    def format(self, x) -> str:
        raise NotImplementedError

    def pow(self, x, n: int):
        if n < 0:
            x, n = self.inv(x), -n
        result = self.identity()
        while n:
            if n & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            n >>= 1
        return result

    def eq(self, x, y) -> bool:
        return x == y

    def conj(self, h, g):
        """h g h^-1"""
        return self.mul(self.mul(h, g), self.inv(h))

    def commute(self, x, y) -> bool:
        return self.eq(self.mul(x, y), self.mul(y, x))

    def is_identity(self, x) -> bool:
        return self.eq(x, self.identity())

    def key(self, x) -> str:
        return self.format(x)

    def canonical(self, s: str) -> str:
        return self.format(self.parse(s))

    def word(self, factors):
        """Evaluate a product of (element, exponent) pairs, left to right."""
        out = self.identity()
        for x, e in factors:
            out = self.mul(out, self.pow(x, e))
        return out


_REGISTRY: dict = {}


def register_family(tag):
    def deco(factory):
        _REGISTRY[tag] = factory
        return factory
    return deco


def make_family(tag: str, params: dict | None = None) -> Family:
    # family modules register on import
    from .. import heisenberg, polycyclic  # noqa: F401
    from ..matrices import qmatrix  # noqa: F401
    try:
        factory = _REGISTRY[tag]
    except KeyError:
        raise UnknownFamilyError(f"unknown family tag {tag!r}") from None
    return factory(**(params or {}))


def known_families():
    from .. import heisenberg, polycyclic  # noqa: F401
    from ..matrices import qmatrix  # noqa: F401
    return sorted(_REGISTRY)
