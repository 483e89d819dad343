"""The mod-2 Steenrod algebra as a rewriting system.

Words ``Sq^{i_1} ... Sq^{i_r}`` are tuples of positive ints, read left to right
as composition (the rightmost square acts first).  The empty tuple is ``Sq^0 = 1``.
Adem relations rewrite any word into a sum of admissible words; the action on
polynomial algebras gives an independent check of the result.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Union

SqWord = tuple[int, ...]

_TOKEN = re.compile(r"sq(\d+)$", re.IGNORECASE)


def binom_mod2(n: int, k: int) -> int:
    """Binomial coefficient mod 2 via Lucas: C(n, k) is odd iff k's bits lie in n's."""
    if k < 0 or n < 0 or k > n:
        return 0
    return int(k & n == k)


def is_admissible(w: SqWord) -> bool:
    return all(w[j] >= 2 * w[j + 1] for j in range(len(w) - 1))


def word_degree(w: SqWord) -> int:
    return sum(w)


def format_word(w: SqWord) -> str:
    return " ".join(f"Sq{i}" for i in w) if w else "1"


def parse_word(text: str) -> SqWord:
    """Parse ``"Sq3 Sq1"``; ``"1"`` or an empty string is the identity."""
    tokens = text.replace(",", " ").split()
    if tokens == ["1"]:
        return ()
    out = []
    for tok in tokens:
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad Steenrod square token {tok!r}")
        i = int(m.group(1))
        if i < 1:
            raise ValueError("Sq0 is the identity and is not written in words")
        out.append(i)
    return tuple(out)


class AdmissibleSum:
    """An F2-linear combination of admissible words of a single degree."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[SqWord] = ()):
        acc: set[SqWord] = set()
        for t in terms:
            t = tuple(t)
            if not is_admissible(t):
                raise ValueError(f"{format_word(t)} is not admissible")
            acc ^= {t}
        degs = {sum(t) for t in acc}
        if len(degs) > 1:
            raise ValueError("inhomogeneous sum")
        self.terms: tuple[SqWord, ...] = tuple(sorted(acc, reverse=True))

    @classmethod
    def of(cls, *words: SqWord) -> AdmissibleSum:
        return cls(words)

    @property
    def degree(self) -> int | None:
        return sum(self.terms[0]) if self.terms else None

    def __add__(self, other: AdmissibleSum) -> AdmissibleSum:
        return AdmissibleSum(self.terms + other.terms)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AdmissibleSum) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[SqWord]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"AdmissibleSum({str(self)!r})"

    def __str__(self) -> str:
        return " + ".join(format_word(t) for t in self.terms) if self.terms else "0"


@lru_cache(maxsize=None)
def _normal_form(word: SqWord) -> frozenset[SqWord]:
    # leftmost inadmissible pair first; each branch is normalised recursively
    for j in range(len(word) - 1):
        a, b = word[j], word[j + 1]
        if a < 2 * b:
            out: set[SqWord] = set()
            for c in range(a // 2 + 1):
                if binom_mod2(b - c - 1, a - 2 * c):
                    pair = (a + b - c, c) if c else (a + b,)
                    out ^= _normal_form(word[:j] + pair + word[j + 2:])
            return frozenset(out)
    return frozenset({word})


def adem_rewrite(w: SqWord | AdmissibleSum | Iterable[SqWord]) -> AdmissibleSum:
    """Admissible normal form of a word (or of a sum of words)."""
    if isinstance(w, tuple) and all(isinstance(i, int) for i in w):
        words: Iterable[SqWord] = [w]
    else:
        words = list(w)
    acc: set[SqWord] = set()
    for word in words:
        if any(i < 1 for i in word):
            raise ValueError("exponents must be positive")
        acc ^= _normal_form(tuple(word))
    return AdmissibleSum(acc)


def compose(x: AdmissibleSum, y: AdmissibleSum) -> AdmissibleSum:
    """The product ``x * y`` in normal form."""
    return adem_rewrite([s + t for s in x for t in y])


def admissible_basis(n: int) -> list[SqWord]:
    if n < 0:
        raise ValueError("degree must be non-negative")

    def gen(rest: int, cap: int) -> Iterator[SqWord]:
        # words of degree `rest` whose first exponent is at most `cap`
        if rest == 0:
            yield ()
            return
        for i in range(min(rest, cap), 0, -1):
            for tail in gen(rest - i, i // 2):
                yield (i,) + tail

    return sorted(gen(n, n), reverse=True)


# ---------------------------------------------------------------------------
# polynomial oracle

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class Poly:
    """A polynomial over F2 in variables of given (weighted) degrees.

    Each variable ``x`` is assumed to satisfy ``Sq(x) = x + x^2``, which holds for
    degree-1 classes and for the generators of ``H^*(CP^oo)`` and ``H^*(HP^oo)``.
    """

    degrees: tuple[int, ...]
    terms: frozenset[Monomial]

    @classmethod
    def zero(cls, degrees: Iterable[int]) -> Poly:
        return cls(tuple(degrees), frozenset())

    @classmethod
    def monomial(cls, exps: Iterable[int], degrees: Iterable[int] | None = None) -> Poly:
        exps = tuple(exps)
        degrees = tuple(degrees) if degrees is not None else (1,) * len(exps)
        if len(degrees) != len(exps):
            raise ValueError("exponent/degree length mismatch")
        return cls(degrees, frozenset({exps}))

    @classmethod
    def variable(cls, i: int, degrees: Iterable[int]) -> Poly:
        degrees = tuple(degrees)
        return cls.monomial(tuple(int(j == i) for j in range(len(degrees))), degrees)

    def mono_degree(self, m: Monomial) -> int:
        return sum(e * g for e, g in zip(m, self.degrees))

    @property
    def degree(self) -> int | None:
        degs = {self.mono_degree(m) for m in self.terms}
        if len(degs) > 1:
            raise ValueError("polynomial is not homogeneous")
        return degs.pop() if degs else None

    def is_homogeneous(self) -> bool:
        return len({self.mono_degree(m) for m in self.terms}) <= 1

    def _check(self, other: Poly) -> None:
        if self.degrees != other.degrees:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other: Poly) -> Poly:
        self._check(other)
        return Poly(self.degrees, self.terms ^ other.terms)

    def __mul__(self, other: Poly) -> Poly:
        self._check(other)
        acc: set[Monomial] = set()
        for a in self.terms:
            for b in other.terms:
                acc ^= {tuple(x + y for x, y in zip(a, b))}
        return Poly(self.degrees, frozenset(acc))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def permute(self, perm: tuple[int, ...]) -> Poly:
        """Rename variable ``i`` to ``perm[i]`` (degrees must be compatible)."""
        n = len(self.degrees)
        degs = [0] * n
        for i, p in enumerate(perm):
            degs[p] = self.degrees[i]
        terms = set()
        for m in self.terms:
            out = [0] * n
            for i, p in enumerate(perm):
                out[p] = m[i]
            terms.add(tuple(out))
        return Poly(tuple(degs), frozenset(terms))

    def format(self, names: Iterable[str] | None = None) -> str:
        names = list(names) if names is not None else [f"x{i + 1}" for i in range(len(self.degrees))]
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, reverse=True):
            factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e]
            parts.append(" ".join(factors) or "1")
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.format()


_FACTOR = re.compile(r"^([A-Za-z][A-Za-z_]*\d*)(?:\^(\d+))?$")


def parse_poly(text: str, degrees: dict[str, int] | None = None) -> tuple[Poly, list[str]]:
    """Parse ``"x1^2 x2 + x3"``; variables default to degree 1.

    Returns the polynomial and the variable names in ring order.
    """
    degrees = dict(degrees or {})
    summands = [s.strip() for s in text.split("+")]
    parsed: list[list[tuple[str, int]]] = []
    names: list[str] = []
    for s in summands:
        if not s:
            raise ValueError(f"empty summand in {text!r}")
        facs = []
        for tok in s.replace("*", " ").split():
            if tok == "1":
                continue
            m = _FACTOR.match(tok)
            if not m:
                raise ValueError(f"bad factor {tok!r}")
            name, e = m.group(1), int(m.group(2) or 1)
            if name not in names:
                names.append(name)
            facs.append((name, e))
        parsed.append(facs)
    names.sort(key=lambda n: (re.sub(r"\d+$", "", n), int(re.search(r"(\d*)$", n).group(1) or 0)))
    index = {n: i for i, n in enumerate(names)}
    degs = tuple(degrees.get(n, 1) for n in names)
    p = Poly.zero(degs)
    for facs in parsed:
        exps = [0] * len(names)
        for name, e in facs:
            exps[index[name]] += e
        p = p + Poly.monomial(exps, degs)
    return p, names


@lru_cache(maxsize=None)
def _square_monomial(k: int, exps: Monomial, degs: tuple[int, ...]) -> frozenset[Monomial]:
    # Cartan over the variables, Sq^{g j}(x^e) = C(e, j) x^{e+j} on each factor
    if not exps:
        return frozenset({()}) if k == 0 else frozenset()
    e, g = exps[0], degs[0]
    out: set[Monomial] = set()
    j = 0
    while j <= e and g * j <= k:
        if binom_mod2(e, j):
            for tail in _square_monomial(k - g * j, exps[1:], degs[1:]):
                out ^= {(e + j,) + tail}
        j += 1
    return frozenset(out)


def square(k: int, p: Poly) -> Poly:
    acc: set[Monomial] = set()
    for m in p.terms:
        acc ^= _square_monomial(k, m, p.degrees)
    return Poly(p.degrees, frozenset(acc))


Operation = Union[SqWord, AdmissibleSum]


def poly_action(s: Operation, p: Poly) -> Poly:
    """Apply a word or an F2-sum of words to a homogeneous polynomial."""
    if not p.is_homogeneous():
        raise ValueError("poly_action needs a homogeneous polynomial")
    words = list(s) if isinstance(s, AdmissibleSum) else [tuple(s)]
    out = Poly.zero(p.degrees)
    for w in words:
        q = p
        for k in reversed(w):
            q = square(k, q)
        out = out + q
    return out
