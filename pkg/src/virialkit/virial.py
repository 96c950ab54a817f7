"""Pressure series from coloured-graph weights and three independent routes to
the virial coefficients.

The pressure is the weighted exponential generating function of connected
coloured graphs; densities are rho_i = z_i dp/dz_i.  The coefficients c(n) of
p as a series in the densities are computed by

* recursive inversion of b(k) = sum_{n<=k} c(n) [z^k] rho(z)^n, order by order,
* Lagrange-Good coefficient extraction with the determinant factor det M(z),
* the two-connected-graph formula (valid for block-factorizing weights).

Exact agreement of the three routes on block-factorizing models is the
central cross-check of the whole package.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .graphs import (
    canonical_colouring,
    canonical_coloured_key,
    connected_block_profiles,
    connected_graph_list,
    two_connected_graph_list,
)
from .series import (
    FLOAT,
    RATIONAL,
    MPSeries,
    MultiIndex,
    SeriesMatrix,
    Truncation,
    admissible_indices,
    determinant,
    exp,
    reciprocal,
    substitute,
)
from .weights import McParams, McWeightSource, PairPotential, SyntheticBlockModel

RECURSIVE = "recursive"
LAGRANGE_GOOD = "lagrange_good"
TWO_CONNECTED = "two_connected"


@dataclass(frozen=True)
class PressureSeries:
    """Pressure as a series in the activities; zero constant term, and
    b(e_k) = 1 for weight-model-built series."""

    series: MPSeries
    provenance: str = ""

    def __post_init__(self):
        if self.series.constant_term != 0:
            raise ValueError("a pressure series has zero constant term")


@dataclass(frozen=True)
class DensityFamily:
    """Per-species density series rho_i(z) = z_i dp/dz_i."""

    by_species: Mapping[int, MPSeries]


@dataclass(frozen=True)
class VirialSeries:
    """The pressure as a series in the densities, tagged with the method."""

    series: MPSeries
    method: str


@dataclass(frozen=True)
class TwoConnectedGF:
    """Generating function of two-connected coloured graphs in the densities;
    every term has total degree >= 2."""

    series: MPSeries

    def __post_init__(self):
        if any(n.degree < 2 for n in self.series.terms):
            raise ValueError("a two-connected generating function must not carry "
                             "terms of degree < 2")


@dataclass(frozen=True)
class InversionProblem:
    """Functional inversion data: per-species series F_k with F_k(0) != 0,
    for the system u_k = w_k F_k(w)."""

    F: Mapping[int, MPSeries]
    truncation: Truncation

    def __post_init__(self):
        for k in range(1, self.truncation.species + 1):
            if k not in self.F:
                raise ValueError(f"missing series F_{k}")
        for k, s in self.F.items():
            if not 1 <= k <= self.truncation.species:
                raise ValueError(f"series F_{k} is outside the species cap")
            if s.constant_term == 0:
                raise ValueError(f"F_{k}(0) = 0; inversion needs nonzero constant terms")


# -- building the pressure ----------------------------------------------------


def _sum_connected_weights(model, m: int, colours: tuple[int, ...]):
    """sum over all connected graphs on {1..m} of w(g, colours)."""
    if isinstance(model, SyntheticBlockModel):
        if m == 1:
            return Fraction(1)
        # Block profiles are colouring-independent, so aggregate graphs by the
        # multiset of canonical (block, restricted colouring) keys first and
        # do exact arithmetic once per distinct multiset.
        multisets: Counter = Counter()
        for profile in connected_block_profiles(m):
            key = tuple(sorted(
                canonical_coloured_key(size, mask, tuple(colours[v - 1] for v in verts))
                for size, mask, verts in profile))
            multisets[key] += 1
        total = Fraction(0)
        for keys, count in multisets.items():
            w = Fraction(1)
            for key in keys:
                w *= model.weight_for_canonical_key(key)
            total += count * w
        return total
    total = None
    for g in connected_graph_list(m):
        w = model.connected_weight(g, colours)
        total = w if total is None else total + w
    return total


def _sum_two_connected_weights(model, m: int, colours: tuple[int, ...]):
    """sum over all two-connected graphs on {1..m} of w(g, colours)."""
    if isinstance(model, SyntheticBlockModel):
        multisets: Counter = Counter()
        for g in two_connected_graph_list(m):
            multisets[canonical_coloured_key(m, g.to_mask(), colours)] += 1
        total = Fraction(0)
        for key, count in multisets.items():
            total += count * model.weight_for_canonical_key(key)
        return total
    total = None
    for g in two_connected_graph_list(m):
        w = model.connected_weight(g, colours)
        total = w if total is None else total + w
    if total is None:
        total = 0.0
    return total


def pressure_from_weights(model, truncation: Truncation) -> PressureSeries:
    """b(n) = (1/n!) sum over connected graphs on |n| vertices with the
    canonical colouring of n."""
    field = model.field
    terms = {}
    for n in admissible_indices(truncation, min_degree=1):
        colours = canonical_colouring(n)
        s = _sum_connected_weights(model, n.degree, colours)
        if field == RATIONAL:
            b = Fraction(s) / n.factorial()
        else:
            b = float(s) / n.factorial()
        if b != 0:
            terms[n] = b
    series = MPSeries(terms, truncation, field)
    for k in range(1, truncation.species + 1):
        if truncation.degree >= 1 and series[MultiIndex.single(k)] != 1:
            raise AssertionError(f"weight-built pressure must have b(e_{k}) = 1")
    return PressureSeries(series, provenance=getattr(model, "provenance", type(model).__name__))


def mc_pressure_series(potential: PairPotential, params: McParams,
                       truncation: Truncation) -> tuple[PressureSeries, dict[MultiIndex, float]]:
    """Monte Carlo pressure series plus the standard error of each b(n)
    (independent per-graph estimates, errors added in quadrature)."""
    source = McWeightSource(potential, params)
    terms: dict[MultiIndex, float] = {}
    errors: dict[MultiIndex, float] = {}
    for n in admissible_indices(truncation, min_degree=1):
        colours = canonical_colouring(n)
        total, var = 0.0, 0.0
        for g in connected_graph_list(n.degree):
            est, err = source.connected_weight_with_error(g, colours)
            total += est
            var += err * err
        fact = n.factorial()
        if total != 0.0:
            terms[n] = total / fact
        errors[n] = var ** 0.5 / fact
    return (PressureSeries(MPSeries(terms, truncation, FLOAT), provenance="monte-carlo"),
            errors)


def densities(p: PressureSeries) -> DensityFamily:
    """rho_i(z) = z_i dp/dz_i for every species under the cap."""
    t = p.series.truncation
    return DensityFamily({k: p.series.diff(k).mul_var(k) for k in range(1, t.species + 1)})


def _active_species(p: PressureSeries) -> tuple[int, ...]:
    seen: set[int] = set()
    for n in p.series.terms:
        seen.update(n.species)
    return tuple(sorted(seen))


def _check_invertible(p: PressureSeries, species) -> dict[int, object]:
    b1 = {}
    for i in species:
        b = p.series[MultiIndex.single(i)]
        if b == 0:
            raise ValueError(f"b(e_{i}) = 0: the density relation is not invertible "
                             f"for species {i}")
        b1[i] = b
    return b1


# -- route 1: recursive inversion ----------------------------------------------


def invert_recursive(p: PressureSeries) -> VirialSeries:
    """Solve b(k) = sum_{n<=k} c(n) [z^k] rho^n order by order in
    graded-lexicographic order (any order respecting n <= k gives the same
    unique answer)."""
    series = p.series
    t = series.truncation
    field = series.field
    active = _active_species(p)
    b1 = _check_invertible(p, active)
    fam = densities(p).by_species

    pow_cache: dict[tuple[int, int], MPSeries] = {}

    def rho_power(species: int, e: int) -> MPSeries:
        key = (species, e)
        if key not in pow_cache:
            if e == 0:
                pow_cache[key] = MPSeries.one(t, field)
            else:
                pow_cache[key] = rho_power(species, e - 1) * fam[species]
        return pow_cache[key]

    def rho_monomial(n: MultiIndex) -> MPSeries:
        out = MPSeries.one(t, field)
        for s, e in n.items():
            out = out * rho_power(s, e)
        return out

    active_set = set(active)
    running = MPSeries.zero(t, field)  # sum of processed c(n) rho^n
    coeffs = {}
    for n in admissible_indices(t, min_degree=1):
        if not set(n.species) <= active_set:
            continue
        diagonal = Fraction(1) if field == RATIONAL else 1.0
        for s, e in n.items():
            diagonal *= b1[s] ** e
        c = (series[n] - running[n]) / diagonal
        if c != 0:
            coeffs[n] = c
            running = running + rho_monomial(n).scaled(c)
    return VirialSeries(MPSeries(coeffs, t, field), RECURSIVE)


# -- route 2: Lagrange-Good extraction ------------------------------------------


class LagrangeGoodInverter:
    """Coefficient extraction c(n) = [z^n] p * (dp/dz)^{-n} * det M(z) with
    M_ij = delta_ij + z_i d2p/dz_i dz_j / (dp/dz_i) over species 1..N, where N
    is the largest species index appearing in n.

    Caches derivatives, reciprocals and determinants so streams of n against
    one pressure series stay cheap.
    """

    def __init__(self, p: PressureSeries):
        self.series = p.series
        self._dp: dict[int, MPSeries] = {}
        self._recip: dict[int, MPSeries] = {}
        self._recip_pow: dict[tuple[int, int], MPSeries] = {}
        self._det: dict[int, MPSeries] = {}

    def _d(self, i: int) -> MPSeries:
        if i not in self._dp:
            self._dp[i] = self.series.diff(i)
        return self._dp[i]

    def _r(self, i: int) -> MPSeries:
        if i not in self._recip:
            d = self._d(i)
            if d.constant_term == 0:
                raise ValueError(f"b(e_{i}) = 0: Lagrange-Good needs dp/dz_{i}(0) != 0")
            self._recip[i] = reciprocal(d)
        return self._recip[i]

    def _r_pow(self, i: int, e: int) -> MPSeries:
        key = (i, e)
        if key not in self._recip_pow:
            if e == 0:
                self._recip_pow[key] = MPSeries.one(self.series.truncation, self.series.field)
            else:
                self._recip_pow[key] = self._r_pow(i, e - 1) * self._r(i)
        return self._recip_pow[key]

    def _det_m(self, n_top: int) -> MPSeries:
        if n_top not in self._det:
            t, field = self.series.truncation, self.series.field
            one = MPSeries.one(t, field)
            zero = MPSeries.zero(t, field)
            rows = []
            for i in range(1, n_top + 1):
                row = []
                for j in range(1, n_top + 1):
                    entry = self._d(i).diff(j).mul_var(i) * self._r(i)
                    row.append((one + entry) if i == j else (zero + entry))
                rows.append(row)
            self._det[n_top] = determinant(SeriesMatrix(rows, t, field))
        return self._det[n_top]

    def coefficient(self, n: MultiIndex):
        pairs = n.items()
        n_top = pairs[-1][0] if pairs else 0
        expr = self.series * self._det_m(n_top)
        for i, e in pairs:
            expr = expr * self._r_pow(i, e)
        return expr[n]


def invert_lagrange_good(p: PressureSeries, n: MultiIndex):
    """One coefficient c(n) by Lagrange-Good extraction."""
    return LagrangeGoodInverter(p).coefficient(n)


# -- route 3: two-connected graphs ----------------------------------------------


def _require_block_factorizing(model):
    if not getattr(model, "block_factorizing", False):
        raise ValueError("this route needs a block-factorizing weight source; "
                         "the caller asserts the hypothesis")


def virial_from_two_connected(model, truncation: Truncation) -> VirialSeries:
    """c(e_k) = 1 and, for |n| >= 2,
    c(n) = -(|n| - 1)/n! * sum over two-connected graphs with the canonical
    colouring.  Valid when the weights factorize over blocks."""
    _require_block_factorizing(model)
    field = model.field
    one = Fraction(1) if field == RATIONAL else 1.0
    terms = {}
    for k in range(1, truncation.species + 1):
        if truncation.degree >= 1:
            terms[MultiIndex.single(k)] = one
    for n in admissible_indices(truncation, min_degree=2):
        s = _sum_two_connected_weights(model, n.degree, canonical_colouring(n))
        c = -(n.degree - 1) * s / n.factorial() if field == FLOAT \
            else Fraction(-(n.degree - 1)) * Fraction(s) / n.factorial()
        if c != 0:
            terms[n] = c
    return VirialSeries(MPSeries(terms, truncation, field), TWO_CONNECTED)


def two_connected_gf(model, truncation: Truncation) -> TwoConnectedGF:
    """B(rho) = sum_{|n|>=2} rho^n / n! * (two-connected weight sum)."""
    _require_block_factorizing(model)
    field = model.field
    terms = {}
    for n in admissible_indices(truncation, min_degree=2):
        s = _sum_two_connected_weights(model, n.degree, canonical_colouring(n))
        b = float(s) / n.factorial() if field == FLOAT else Fraction(s) / n.factorial()
        if b != 0:
            terms[n] = b
    return TwoConnectedGF(MPSeries(terms, truncation, field))


def chemical_potential(model, truncation: Truncation, k: int) -> MPSeries:
    """The chemical-potential correction log z_k - log rho_k = -dB/drho_k."""
    B = two_connected_gf(model, truncation).series
    return -B.diff(k)


@dataclass
class GhostReport:
    per_species: dict[int, bool]
    max_residual: Fraction
    passed: bool


def verify_ghost_relation(model, truncation: Truncation) -> GhostReport:
    """Check rho_k(z) = z_k exp(dB/drho_k(rho(z))) exactly up to truncation.

    The left side comes from the connected-graph pressure, the right side from
    the two-connected generating function; equality is the rooted dissymmetry
    identity, with the root of dB/drho_k acting as a ghost vertex of colour k.
    """
    _require_block_factorizing(model)
    if model.field != RATIONAL:
        raise ValueError("the ghost relation check needs the exact field")
    p = pressure_from_weights(model, truncation)
    fam = densities(p).by_species
    B = two_connected_gf(model, truncation).series
    per_species = {}
    worst = Fraction(0)
    for k in range(1, truncation.species + 1):
        rhs = exp(substitute(B.diff(k), fam)).mul_var(k)
        diff = rhs - fam[k]
        per_species[k] = diff.is_zero()
        for c in diff.terms.values():
            worst = max(worst, abs(c))
    return GhostReport(per_species, worst, all(per_species.values()))


# -- functional inversion (general inverse function theorem form) ----------------


def functional_inverse(problem: InversionProblem) -> dict[int, MPSeries]:
    """Solve u_k = w_k F_k(w) for w_k(u) = u_k G_k(u), order by order.

    Iterating w <- (u_k / F_k(w))_k gains one exact order per pass; the
    computation runs one degree above the problem truncation so that G_k is
    exact through the full requested degree.
    """
    t = problem.truncation
    lifted = Truncation(t.degree + 1, t.species)
    F = {k: s.with_truncation(lifted) for k, s in problem.F.items()}
    H = {k: reciprocal(F[k]) for k in F}
    w = {k: MPSeries.variable(k, lifted, s.field).scaled(H[k].constant_term)
         for k, s in F.items()}
    for _ in range(t.degree + 1):
        w = {k: substitute(H[k], w).mul_var(k) for k in F}
    return w


def invert_functional(problem: InversionProblem, k: int, n: MultiIndex):
    """[u^n] G_k(u) where the inverse is w_k(u) = u_k G_k(u)."""
    if k not in problem.F:
        raise ValueError(f"no series F_{k} in the problem")
    if not problem.truncation.admits(n):
        raise ValueError(f"{n!r} not admissible at the problem truncation")
    w = functional_inverse(problem)
    g_k = w[k].div_var(k).with_truncation(problem.truncation)
    return g_k[n]


def virial_inversion_problem(p: PressureSeries) -> InversionProblem:
    """The virial specialisation F_k = dp/dz_k, so that z_k(rho) = rho_k G_k(rho)."""
    t = p.series.truncation
    return InversionProblem({k: p.series.diff(k) for k in range(1, t.species + 1)}, t)
