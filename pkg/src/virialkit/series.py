"""Truncated multivariate formal power series over finitely many species.

A series is a sparse map from multi-indices (exponent vectors over species
1..S with finitely many nonzero entries) to coefficients, truncated by total
degree D and species cap S.  Coefficients live in one of two fields, exact
rationals (`fractions.Fraction`) or IEEE doubles, chosen per series and never
mixed; conversion is explicit and one-way (rational -> float).

All values are immutable after construction and all operations are pure, so
series can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple

RATIONAL = "rational"
FLOAT = "float"

_FIELDS = (RATIONAL, FLOAT)

MAX_DETERMINANT_DIM = 12


class MultiIndex:
    """Sparse exponent vector: species index (>= 1) -> exponent (>= 1).

    Zero exponents are never stored, so the empty index is the monomial 1.
    """

    __slots__ = ("_pairs",)

    def __init__(self, exponents: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = exponents.items() if isinstance(exponents, Mapping) else exponents
        pairs = []
        for species, exp in items:
            if species < 1:
                raise ValueError(f"species index must be >= 1, got {species}")
            if exp < 0:
                raise ValueError(f"exponent must be >= 0, got {exp} for species {species}")
            if exp > 0:
                pairs.append((int(species), int(exp)))
        pairs.sort()
        for a, b in zip(pairs, pairs[1:]):
            if a[0] == b[0]:
                raise ValueError(f"duplicate species {a[0]} in multi-index")
        self._pairs = tuple(pairs)

    @classmethod
    def single(cls, species: int, exponent: int = 1) -> MultiIndex:
        return cls([(species, exponent)])

    @classmethod
    def from_exponents(cls, exponents: Iterable[int]) -> MultiIndex:
        """Dense constructor: (n1, n2, ...) for species 1, 2, ..."""
        return cls(enumerate(exponents, start=1))

    @property
    def degree(self) -> int:
        return sum(e for _, e in self._pairs)

    @property
    def species(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self._pairs)

    def items(self) -> tuple[tuple[int, int], ...]:
        return self._pairs

    def get(self, species: int) -> int:
        for s, e in self._pairs:
            if s == species:
                return e
        return 0

    def factorial(self) -> int:
        """n! = prod_i n_i!"""
        out = 1
        for _, e in self._pairs:
            out *= math.factorial(e)
        return out

    def leq(self, other: MultiIndex) -> bool:
        """Componentwise n_i <= k_i for all i."""
        return all(e <= other.get(s) for s, e in self._pairs)

    def incremented(self, species: int, by: int = 1) -> MultiIndex:
        d = dict(self._pairs)
        d[species] = d.get(species, 0) + by
        return MultiIndex(d)

    def decremented(self, species: int) -> MultiIndex:
        e = self.get(species)
        if e == 0:
            raise ValueError(f"species {species} has exponent 0, cannot decrement")
        d = dict(self._pairs)
        d[species] = e - 1
        return MultiIndex(d)

    def __add__(self, other: MultiIndex) -> MultiIndex:
        d = dict(self._pairs)
        for s, e in other._pairs:
            d[s] = d.get(s, 0) + e
        return MultiIndex(d)

    def dense(self, species_cap: int) -> tuple[int, ...]:
        return tuple(self.get(s) for s in range(1, species_cap + 1))

    def grlex_key(self, species_cap: int) -> tuple:
        return (self.degree, self.dense(species_cap))

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiIndex) and self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash(self._pairs)

    def __bool__(self) -> bool:
        return bool(self._pairs)

    def __repr__(self) -> str:
        if not self._pairs:
            return "MultiIndex()"
        return "MultiIndex({%s})" % ", ".join(f"{s}: {e}" for s, e in self._pairs)


ZERO_INDEX = MultiIndex()


@dataclass(frozen=True)
class Truncation:
    """Joint truncation: total degree <= degree AND species index <= species."""

    degree: int
    species: int

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"max total degree must be >= 0, got {self.degree}")
        if self.species < 1:
            raise ValueError(f"species cap must be >= 1, got {self.species}")

    def admits(self, n: MultiIndex) -> bool:
        if n.degree > self.degree:
            return False
        pairs = n.items()
        return not pairs or pairs[-1][0] <= self.species


def admissible_indices(truncation: Truncation, min_degree: int = 0,
                       max_degree: int | None = None) -> Iterator[MultiIndex]:
    """All admissible multi-indices in graded-lexicographic order."""
    top = truncation.degree if max_degree is None else min(max_degree, truncation.degree)
    s = truncation.species

    def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
        if parts == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    for d in range(min_degree, top + 1):
        for dense in compositions(d, s):
            yield MultiIndex.from_exponents(dense)


def _coerce(value, field: str):
    if field == RATIONAL:
        if isinstance(value, float):
            raise ValueError("float coefficient in a rational-field series; "
                             "convert the series explicitly with to_float()")
        return Fraction(value)
    if field == FLOAT:
        return float(value)
    raise ValueError(f"unknown coefficient field {field!r}")


def _zero(field: str):
    return Fraction(0) if field == RATIONAL else 0.0


def _one(field: str):
    return Fraction(1) if field == RATIONAL else 1.0


class MPSeries:
    """Sparse truncated multivariate formal power series.

    Stored terms are canonical: every multi-index is admissible under the
    truncation and no stored coefficient is zero.
    """

    __slots__ = ("terms", "truncation", "field")

    def __init__(self, terms: Mapping[MultiIndex, object], truncation: Truncation,
                 field: str = RATIONAL):
        if field not in _FIELDS:
            raise ValueError(f"unknown coefficient field {field!r}")
        canonical = {}
        for n, c in terms.items():
            if not truncation.admits(n):
                raise ValueError(f"term {n!r} not admissible under {truncation}")
            c = _coerce(c, field)
            if c != 0:
                canonical[n] = c
        self.terms = canonical
        self.truncation = truncation
        self.field = field

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, truncation: Truncation, field: str = RATIONAL) -> MPSeries:
        return cls({}, truncation, field)

    @classmethod
    def constant(cls, value, truncation: Truncation, field: str = RATIONAL) -> MPSeries:
        return cls({ZERO_INDEX: value}, truncation, field)

    @classmethod
    def one(cls, truncation: Truncation, field: str = RATIONAL) -> MPSeries:
        return cls.constant(1, truncation, field)

    @classmethod
    def variable(cls, species: int, truncation: Truncation, field: str = RATIONAL) -> MPSeries:
        return cls({MultiIndex.single(species): 1}, truncation, field)

    # -- basic queries -----------------------------------------------------

    def __getitem__(self, n: MultiIndex):
        """Coefficient of z^n; n must be admissible (inadmissible is undefined, not 0)."""
        if not self.truncation.admits(n):
            raise ValueError(f"coefficient of {n!r} is undefined at truncation {self.truncation}")
        return self.terms.get(n, _zero(self.field))

    @property
    def constant_term(self):
        return self.terms.get(ZERO_INDEX, _zero(self.field))

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[MultiIndex, object]]:
        """Terms in graded-lexicographic order (deterministic output)."""
        s = self.truncation.species
        return sorted(self.terms.items(), key=lambda kv: kv[0].grlex_key(s))

    def __eq__(self, other) -> bool:
        return (isinstance(other, MPSeries) and self.field == other.field
                and self.truncation == other.truncation and self.terms == other.terms)

    __hash__ = None

    def __repr__(self) -> str:
        if not self.terms:
            body = "0"
        else:
            parts = []
            for n, c in self.sorted_terms()[:6]:
                mono = "*".join(f"z{s}^{e}" if e > 1 else f"z{s}" for s, e in n.items()) or "1"
                parts.append(f"{c}*{mono}")
            body = " + ".join(parts)
            if len(self.terms) > 6:
                body += f" + ... ({len(self.terms)} terms)"
        return f"<MPSeries {body} | D={self.truncation.degree} S={self.truncation.species} {self.field}>"

    def _check_compatible(self, other: MPSeries, op: str):
        if not isinstance(other, MPSeries):
            raise TypeError(f"cannot {op} MPSeries with {type(other).__name__}")
        if self.field != other.field:
            raise ValueError(f"cannot {op} series over different fields "
                             f"({self.field} vs {other.field})")
        if self.truncation != other.truncation:
            raise ValueError(f"cannot {op} series with different truncations "
                             f"({self.truncation} vs {other.truncation})")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: MPSeries) -> MPSeries:
        self._check_compatible(other, "add")
        out = dict(self.terms)
        for n, c in other.terms.items():
            out[n] = out.get(n, _zero(self.field)) + c
        return MPSeries(out, self.truncation, self.field)

    def __neg__(self) -> MPSeries:
        return MPSeries({n: -c for n, c in self.terms.items()}, self.truncation, self.field)

    def __sub__(self, other: MPSeries) -> MPSeries:
        self._check_compatible(other, "subtract")
        out = dict(self.terms)
        for n, c in other.terms.items():
            out[n] = out.get(n, _zero(self.field)) - c
        return MPSeries(out, self.truncation, self.field)

    def __mul__(self, other) -> MPSeries:
        if not isinstance(other, MPSeries):
            return self.scaled(other)
        self._check_compatible(other, "multiply")
        degree_cap = self.truncation.degree
        out: dict[MultiIndex, object] = {}
        zero = _zero(self.field)
        for n1, c1 in self.terms.items():
            d1 = n1.degree
            for n2, c2 in other.terms.items():
                if d1 + n2.degree > degree_cap:
                    continue
                n = n1 + n2
                out[n] = out.get(n, zero) + c1 * c2
        return MPSeries(out, self.truncation, self.field)

    def __rmul__(self, other) -> MPSeries:
        return self.scaled(other)

    def scaled(self, scalar) -> MPSeries:
        c = _coerce(scalar, self.field)
        return MPSeries({n: c * v for n, v in self.terms.items()}, self.truncation, self.field)

    def diff(self, species: int) -> MPSeries:
        """Partial derivative with respect to z_species."""
        if not 1 <= species <= self.truncation.species:
            raise ValueError(f"species {species} out of range 1..{self.truncation.species}")
        out = {}
        for n, c in self.terms.items():
            e = n.get(species)
            if e > 0:
                out[n.decremented(species)] = c * e
        return MPSeries(out, self.truncation, self.field)

    def mul_var(self, species: int) -> MPSeries:
        """Multiply by the variable z_species, discarding over-truncation terms."""
        if not 1 <= species <= self.truncation.species:
            raise ValueError(f"species {species} out of range 1..{self.truncation.species}")
        out = {}
        for n, c in self.terms.items():
            if n.degree + 1 <= self.truncation.degree:
                out[n.incremented(species)] = c
        return MPSeries(out, self.truncation, self.field)

    def div_var(self, species: int) -> MPSeries:
        """Divide by z_species; every term must contain the variable."""
        out = {}
        for n, c in self.terms.items():
            if n.get(species) == 0:
                raise ValueError(f"term {n!r} has no factor of species {species}")
            out[n.decremented(species)] = c
        return MPSeries(out, self.truncation, self.field)

    # -- conversions -------------------------------------------------------

    def to_float(self) -> MPSeries:
        """Explicit one-way conversion rational -> float."""
        if self.field == FLOAT:
            return self
        return MPSeries({n: float(c) for n, c in self.terms.items()}, self.truncation, FLOAT)

    def with_truncation(self, truncation: Truncation) -> MPSeries:
        """Explicit re-truncation; terms outside the new truncation are dropped.

        Widening the degree is permitted but introduces no information: the
        caller asserts that coefficients beyond the old order are genuinely
        known (e.g. the series is a polynomial).
        """
        kept = {n: c for n, c in self.terms.items() if truncation.admits(n)}
        return MPSeries(kept, truncation, self.field)

    def evaluate(self, point: Mapping[int, complex]) -> complex:
        """Numeric evaluation at a point (coefficients coerced through float)."""
        total = 0j
        for n, c in self.terms.items():
            v = complex(float(c) if self.field == RATIONAL else c)
            for s, e in n.items():
                v *= point[s] ** e
            total += v
        return total


# -- transcendental / inverse operations ------------------------------------


def exp(a: MPSeries) -> MPSeries:
    """exp of a series with zero constant term: sum_m a^m / m! truncated."""
    if a.constant_term != 0:
        raise ValueError("exp requires a zero constant term")
    result = MPSeries.one(a.truncation, a.field)
    term = MPSeries.one(a.truncation, a.field)
    for m in range(1, a.truncation.degree + 1):
        term = term * a
        if term.is_zero():
            break
        if a.field == RATIONAL:
            result = result + term.scaled(Fraction(1, math.factorial(m)))
        else:
            result = result + term.scaled(1.0 / math.factorial(m))
    return result


class LogSeries(NamedTuple):
    """log of a series f = c0 * (1 + u): the pair (c0, log(1+u) as a series).

    Keeping the positive constant c0 apart from the pure-series part keeps the
    rational field closed: no irrational log(c0) enters exact arithmetic.
    """

    leading: object
    series: MPSeries

    def as_series(self) -> MPSeries:
        """Fold log(leading) into the constant term (float field only,
        unless the leading constant is exactly 1)."""
        if self.leading == 1:
            return self.series
        if self.series.field != FLOAT:
            raise ValueError("cannot fold log of a constant != 1 into a rational series")
        const = MPSeries.constant(math.log(self.leading), self.series.truncation, FLOAT)
        return self.series + const


def log(a: MPSeries) -> LogSeries:
    """Series logarithm log(c0) + log(1 + (a/c0 - 1)), Mercator expansion.

    Requires a positive constant term c0; the pure-series part is returned
    alongside c0 (see :class:`LogSeries`).
    """
    c0 = a.constant_term
    if c0 == 0:
        raise ValueError("log requires a nonzero constant term")
    if c0 < 0:
        raise ValueError("log requires a positive constant term over a real field")
    one = MPSeries.one(a.truncation, a.field)
    u = a.scaled(1 / c0 if a.field == FLOAT else Fraction(1) / c0) - one
    result = MPSeries.zero(a.truncation, a.field)
    power = one
    for m in range(1, a.truncation.degree + 1):
        power = power * u
        if power.is_zero():
            break
        sign = 1 if m % 2 == 1 else -1
        if a.field == RATIONAL:
            result = result + power.scaled(Fraction(sign, m))
        else:
            result = result + power.scaled(sign / m)
    return LogSeries(c0, result)


def reciprocal(a: MPSeries) -> MPSeries:
    """Multiplicative inverse 1/a via the geometric series; needs a(0) != 0."""
    c0 = a.constant_term
    if c0 == 0:
        raise ValueError("reciprocal requires a nonzero constant term")
    inv_c0 = 1 / c0 if a.field == FLOAT else Fraction(1) / c0
    one = MPSeries.one(a.truncation, a.field)
    u = a.scaled(inv_c0) - one
    result = one  # sum of (-u)^m, m = 0..D
    power = one
    for m in range(1, a.truncation.degree + 1):
        power = power * u
        if power.is_zero():
            break
        result = result + (power if m % 2 == 0 else -power)
    return result.scaled(inv_c0)


def power_product(n: MultiIndex, family: Mapping[int, MPSeries], *,
                  truncation: Truncation | None = None,
                  field: str | None = None) -> MPSeries:
    """prod_i family[i]^{n_i}, truncated.  The empty product is 1."""
    if truncation is None or field is None:
        if not family:
            raise ValueError("empty family needs explicit truncation and field")
        probe = next(iter(family.values()))
        truncation = truncation or probe.truncation
        field = field or probe.field
    for s in family.values():
        if s.truncation != truncation or s.field != field:
            raise ValueError("family series must share one truncation and field")
    result = MPSeries.one(truncation, field)
    for species, e in n.items():
        if species not in family:
            raise ValueError(f"family has no series for species {species}")
        base = family[species]
        for _ in range(e):
            result = result * base
            if result.is_zero():
                return result
    return result


def substitute(outer: MPSeries, family: Mapping[int, MPSeries]) -> MPSeries:
    """Compose: sum_n outer[n] * prod_i family[i]^{n_i}.

    Every family series must have zero constant term (the summability
    condition making the composition finite order by order).
    """
    if not family:
        raise ValueError("substitute needs a nonempty family")
    probe = next(iter(family.values()))
    truncation, field = probe.truncation, probe.field
    for s in family.values():
        if s.truncation != truncation or s.field != field:
            raise ValueError("family series must share one truncation and field")
        if s.constant_term != 0:
            raise ValueError("substitution family must have zero constant terms")
    if field != outer.field:
        raise ValueError(f"cannot substitute {field} family into {outer.field} series")

    # cache powers family[i]^e as needed
    powers: dict[tuple[int, int], MPSeries] = {}

    def fam_power(species: int, e: int) -> MPSeries:
        key = (species, e)
        if key not in powers:
            if e == 0:
                powers[key] = MPSeries.one(truncation, field)
            else:
                powers[key] = fam_power(species, e - 1) * family[species]
        return powers[key]

    result = MPSeries.zero(truncation, field)
    for n, c in outer.terms.items():
        if n.degree > truncation.degree:
            continue  # each family factor has degree >= 1
        term = MPSeries.constant(c, truncation, field)
        for species, e in n.items():
            if species not in family:
                raise ValueError(f"family has no series for species {species}")
            term = term * fam_power(species, e)
            if term.is_zero():
                break
        result = result + term
    return result


class SeriesMatrix:
    """Square matrix of series sharing one truncation and field."""

    __slots__ = ("entries", "dimension", "truncation", "field")

    def __init__(self, entries: Iterable[Iterable[MPSeries]], truncation: Truncation,
                 field: str = RATIONAL):
        rows = tuple(tuple(row) for row in entries)
        n = len(rows)
        for row in rows:
            if len(row) != n:
                raise ValueError("matrix must be square")
            for entry in row:
                if entry.truncation != truncation or entry.field != field:
                    raise ValueError("all entries must share the matrix truncation and field")
        self.entries = rows
        self.dimension = n
        self.truncation = truncation
        self.field = field


def determinant(m: SeriesMatrix) -> MPSeries:
    """Cofactor-expansion determinant; the empty determinant is 1."""
    if m.dimension > MAX_DETERMINANT_DIM:
        raise ValueError(f"determinant limited to dimension {MAX_DETERMINANT_DIM}, "
                         f"got {m.dimension}")

    def det(rows: tuple[tuple[MPSeries, ...], ...]) -> MPSeries:
        k = len(rows)
        if k == 0:
            return MPSeries.one(m.truncation, m.field)
        if k == 1:
            return rows[0][0]
        total = MPSeries.zero(m.truncation, m.field)
        for j in range(k):
            minor = tuple(tuple(r[c] for c in range(k) if c != j) for r in rows[1:])
            term = rows[0][j] * det(minor)
            total = total + (term if j % 2 == 0 else -term)
        return total

    return det(m.entries)


# -- JSON interchange --------------------------------------------------------


def series_to_json(a: MPSeries) -> dict:
    """JSON document for a series; rationals as decimal-free "p/q" strings."""
    terms = []
    for n, c in a.sorted_terms():
        entry = {"n": {str(s): e for s, e in n.items()}}
        entry["c"] = str(c) if a.field == RATIONAL else float(c)
        terms.append(entry)
    return {
        "truncation": {"degree": a.truncation.degree, "species": a.truncation.species},
        "field": a.field,
        "terms": terms,
    }


def series_from_json(doc: Mapping) -> MPSeries:
    trunc = Truncation(int(doc["truncation"]["degree"]), int(doc["truncation"]["species"]))
    field = doc["field"]
    if field not in _FIELDS:
        raise ValueError(f"unknown coefficient field {field!r}")
    terms = {}
    for entry in doc.get("terms", ()):
        n = MultiIndex({int(s): int(e) for s, e in entry["n"].items()})
        c = entry["c"]
        if field == RATIONAL:
            # tolerate the typographic minus that sneaks in from documents
            c = Fraction(str(c).replace("−", "-"))
        terms[n] = c
    return MPSeries(terms, trunc, field)
