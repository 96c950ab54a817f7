"""Convergence-domain constants and numeric audits for virial coefficients.

A domain spec assigns each species contour and convergence radii 0 < r < R
and a log-derivative budget a >= 0.  From these the explicit admissible
constant C is evaluated, per-coefficient bounds are formed, the density
polydisk is described, and computed virial coefficients can be audited
against the bound.  Hypothesis checks are sampling-based reports: they can
falsify, never prove.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .series import MultiIndex
from .virial import PressureSeries, VirialSeries


@dataclass(frozen=True)
class SpeciesDomain:
    r: float
    R: float
    a: float

    def __post_init__(self):
        if not 0 < self.r < self.R:
            raise ValueError(f"need 0 < r < R, got r={self.r}, R={self.R}")
        if self.a < 0:
            raise ValueError(f"need a >= 0, got a={self.a}")


@dataclass(frozen=True)
class DomainSpec:
    """Per-species (r_i, R_i, a_i) for finitely many active species."""

    species: Mapping[int, SpeciesDomain]

    def __post_init__(self):
        if not self.species:
            raise ValueError("a domain spec needs at least one species")
        if any(i < 1 for i in self.species):
            raise ValueError("species indices must be >= 1")

    def require(self, indices) -> None:
        missing = [i for i in indices if i not in self.species]
        if missing:
            raise ValueError(f"species {missing} not covered by the domain spec")


def make_domain_spec(entries: Sequence[tuple[int, float, float, float]]) -> DomainSpec:
    return DomainSpec({i: SpeciesDomain(r, R, a) for i, r, R, a in entries})


def det_bound_constant(spec: DomainSpec) -> float:
    """The explicit admissible constant
    C = exp[ sum_i r_i/(u_i (R_i - r_i)) * sqrt(sum_j u_j^2 a_j^2) ]
    with the choice u_j = sqrt(r_j / R_j)."""
    quad = sum((d.r / d.R) * d.a * d.a for d in spec.species.values())
    lead = sum(d.r / (math.sqrt(d.r / d.R) * (d.R - d.r)) for d in spec.species.values())
    return math.exp(lead * math.sqrt(quad))


def _fraction_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    pn, pd = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if pn * pn == x.numerator and pd * pd == x.denominator:
        return Fraction(pn, pd)
    return None


def det_bound_exponent_exact(spec: DomainSpec) -> Fraction:
    """The exponent of C as an exact rational, when r_i R_i and
    sum_j (r_j/R_j) a_j^2 are rational squares; ValueError otherwise."""
    quad = Fraction(0)
    lead = Fraction(0)
    for d in spec.species.values():
        r, R, a = (Fraction(str(v)) for v in (d.r, d.R, d.a))
        quad += (r / R) * a * a
        root = _fraction_sqrt(r * R)
        if root is None:
            raise ValueError(f"sqrt(r*R) irrational for r={d.r}, R={d.R}")
        lead += root / (R - r)
    quad_root = _fraction_sqrt(quad)
    if quad_root is None:
        raise ValueError("sum of u_j^2 a_j^2 is not a rational square")
    return lead * quad_root


def virial_bound(spec: DomainSpec, sup_p: float, n: MultiIndex) -> float:
    """C * sup|p| * prod_i (e^{a_i}/r_i)^{n_i}."""
    if sup_p < 0:
        raise ValueError("sup_p must be >= 0")
    spec.require(n.species)
    out = det_bound_constant(spec) * sup_p
    for i, e in n.items():
        d = spec.species[i]
        out *= (math.exp(d.a) / d.r) ** e
    return out


def inverse_bound(spec: DomainSpec, n: MultiIndex, k: MultiIndex) -> float:
    """C * prod_i e^{a_i (n_i + k_i)} / r_i^{n_i} for [rho^n] z(rho)^k / rho^k."""
    spec.require(n.species)
    spec.require(k.species)
    out = det_bound_constant(spec)
    for i in sorted(set(n.species) | set(k.species)):
        d = spec.species[i]
        out *= math.exp(d.a * (n.get(i) + k.get(i))) / d.r ** n.get(i)
    return out


@dataclass(frozen=True)
class DensityDomain:
    """The density polydisk: |rho_i| < r_i e^{-a_i}, with the weighted sum
    sum_i |rho_i| e^{a_i}/r_i reported (finite automatically under a cap)."""

    radii: Mapping[int, float]
    spec: DomainSpec

    def weighted_sum(self, rho: Mapping[int, float]) -> float:
        self.spec.require(rho.keys())
        return sum(abs(v) * math.exp(self.spec.species[i].a) / self.spec.species[i].r
                   for i, v in rho.items())

    def contains(self, rho: Mapping[int, float]) -> bool:
        self.spec.require(rho.keys())
        return all(abs(v) < self.radii[i] for i, v in rho.items())


def density_domain(spec: DomainSpec) -> DensityDomain:
    return DensityDomain({i: d.r * math.exp(-d.a) for i, d in spec.species.items()}, spec)


def z_of_rho_bound(spec: DomainSpec, rho: Mapping[int, float], i: int) -> float:
    """C |rho_i| e^{a_i} prod_j (1 - e^{a_j}|rho_j|/r_j)^{-1}, for rho strictly
    inside the density polydisk."""
    spec.require(rho.keys())
    spec.require([i])
    product = 1.0
    for j, v in rho.items():
        d = spec.species[j]
        factor = 1.0 - math.exp(d.a) * abs(v) / d.r
        if factor <= 0:
            raise ValueError(f"rho_{j} = {v} is on or outside the density polydisk")
        product /= factor
    return det_bound_constant(spec) * abs(rho.get(i, 0.0)) * math.exp(spec.species[i].a) * product


# -- hypothesis checks ---------------------------------------------------------


@dataclass
class SpeciesLogCheck:
    species: int
    max_log_abs: float
    budget: float
    zero_found: bool
    passed: bool


@dataclass
class HypothesisReport:
    coefficient_sum: float          # sum |b(n)| R^n over stored terms
    log_checks: list[SpeciesLogCheck]
    sqrt_ratio_sum: float           # sum sqrt(r_i/R_i)
    ra2_sum: float                  # sum r_i a_i^2 / R_i
    sample_count: int
    passed: bool

    def as_dict(self) -> dict:
        return {
            "coefficient_sum_upper_bound": self.coefficient_sum,
            "log_derivative": [{"species": c.species, "max_log_abs": c.max_log_abs,
                                "budget": c.budget, "zero_found": c.zero_found,
                                "passed": c.passed} for c in self.log_checks],
            "sqrt_ratio_sum": self.sqrt_ratio_sum,
            "ra2_sum": self.ra2_sum,
            "sample_count": self.sample_count,
            "passed": self.passed,
        }


def coefficient_sum_bound(p: PressureSeries, spec: DomainSpec) -> float:
    """sum |b(n)| R^n over stored terms: an upper bound for sup_D |p| at
    truncation order (the tail is not represented)."""
    total = 0.0
    for n, c in p.series.terms.items():
        spec.require(n.species)
        v = abs(float(c))
        for i, e in n.items():
            v *= spec.species[i].R ** e
        total += v
    return total


def _sample_points(spec: DomainSpec, species: Sequence[int], samples: int,
                   seed: int) -> list[dict[int, complex]]:
    """Deterministic ring/axis grid plus random interior points of the
    activity polydisk.  The grid pins the real-axis extremes so worked
    single-species examples are found without luck."""
    angles = [0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi]
    points = []
    if 8 ** len(species) <= 4096:
        choices = []
        for i in species:
            d = spec.species[i]
            choices.append([radius * cmath.exp(1j * t)
                            for radius in (d.r, d.R) for t in angles])
        idx = [0] * len(species)
        while True:
            points.append({i: choices[pos][idx[pos]] for pos, i in enumerate(species)})
            for pos in range(len(species)):
                idx[pos] += 1
                if idx[pos] < len(choices[pos]):
                    break
                idx[pos] = 0
            else:
                break
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        z = {}
        for i in species:
            d = spec.species[i]
            radius = d.R * math.sqrt(rng.random())
            z[i] = radius * cmath.exp(2j * math.pi * rng.random())
        points.append(z)
    return points


def hypothesis_check(p: PressureSeries, spec: DomainSpec, samples: int,
                     seed: int = 0) -> HypothesisReport:
    """Sampling audit of the convergence hypotheses: (i) the stored-term
    coefficient sum, (ii) |log dp/dz_i| against a_i on sampled contour and
    interior points, (iii) the two summability partial sums.  Report-only."""
    species = list(range(1, p.series.truncation.species + 1))
    spec.require(species)
    points = _sample_points(spec, species, samples, seed)
    partials = {i: p.series.diff(i) for i in species}

    checks = []
    for i in species:
        worst = 0.0
        zero_found = False
        for z in points:
            value = partials[i].evaluate(z)
            if abs(value) < 1e-150:
                zero_found = True
                continue
            worst = max(worst, abs(cmath.log(value)))
        budget = spec.species[i].a
        checks.append(SpeciesLogCheck(i, worst, budget, zero_found,
                                      (not zero_found) and worst < budget))

    sqrt_sum = sum(math.sqrt(d.r / d.R) for d in spec.species.values())
    ra2 = sum(d.r * d.a * d.a / d.R for d in spec.species.values())
    return HypothesisReport(coefficient_sum_bound(p, spec), checks, sqrt_sum, ra2,
                            len(points), all(c.passed for c in checks))


@dataclass
class BoundAuditEntry:
    index: MultiIndex
    value: float
    bound: float
    margin: float
    ok: bool


@dataclass
class BoundAuditReport:
    sup_p: float                     # truncation-order upper bound for sup_D |p|
    entries: list[BoundAuditEntry]
    violations: list[BoundAuditEntry]
    passed: bool

    def as_dict(self) -> dict:
        def entry(e: BoundAuditEntry) -> dict:
            return {"n": {str(s): x for s, x in e.index.items()}, "value": e.value,
                    "bound": e.bound, "margin": e.margin, "ok": e.ok}
        return {
            "sup_p_truncation_order_upper_bound": self.sup_p,
            "entries": [entry(e) for e in self.entries],
            "violations": [entry(e) for e in self.violations],
            "passed": self.passed,
        }


def check_coefficient_bounds(p: PressureSeries, spec: DomainSpec,
                             c: VirialSeries) -> BoundAuditReport:
    """Audit every computed coefficient against C sup|p| prod (e^a/r)^n.

    A violation means a bug or a failed hypothesis and is flagged loudly in
    the report; the audit itself never raises.
    """
    sup_p = coefficient_sum_bound(p, spec)
    entries = []
    for n, value in c.series.sorted_terms():
        bound = virial_bound(spec, sup_p, n)
        v = abs(float(value))
        entries.append(BoundAuditEntry(n, v, bound, bound - v, v <= bound))
    violations = [e for e in entries if not e.ok]
    return BoundAuditReport(sup_p, entries, violations, not violations)


@dataclass
class BoundReport:
    """Everything `bounds compute` reports: the constant, per-index bound
    values, and (when a pressure series is supplied) the hypothesis report
    and coefficient audit."""

    constant: float
    per_n_bounds: list[tuple[MultiIndex, float]]
    hypothesis: HypothesisReport | None = None
    audit: BoundAuditReport | None = None

    def __post_init__(self):
        if self.constant < 1.0:
            raise AssertionError("the bound constant is exp of a nonnegative sum")

    @property
    def passed(self) -> bool:
        for part in (self.hypothesis, self.audit):
            if part is not None and not part.passed:
                return False
        return True

    def as_dict(self) -> dict:
        doc = {"constant": self.constant,
               "per_n_bounds": [{"n": {str(s): e for s, e in n.items()}, "bound": b}
                                for n, b in self.per_n_bounds]}
        if self.hypothesis is not None:
            doc["hypothesis"] = self.hypothesis.as_dict()
        if self.audit is not None:
            doc["audit"] = self.audit.as_dict()
        return doc


def bound_report(spec: DomainSpec, p: PressureSeries | None = None,
                 c: VirialSeries | None = None, indices=(),
                 samples: int = 500, seed: int = 0) -> BoundReport:
    constant = det_bound_constant(spec)
    if p is None:
        return BoundReport(constant, [(n, virial_bound(spec, 1.0, n)) for n in indices])
    sup_p = coefficient_sum_bound(p, spec)
    per_n = [(n, virial_bound(spec, sup_p, n)) for n in indices]
    hypothesis = hypothesis_check(p, spec, samples, seed)
    audit = check_coefficient_bounds(p, spec, c) if c is not None else None
    return BoundReport(constant, per_n, hypothesis, audit)


# -- JSON ------------------------------------------------------------------------


def domain_spec_to_json(spec: DomainSpec) -> dict:
    return {"species": [{"i": i, "r": d.r, "R": d.R, "a": d.a}
                        for i, d in sorted(spec.species.items())]}


def domain_spec_from_json(doc: Mapping) -> DomainSpec:
    return DomainSpec({int(e["i"]): SpeciesDomain(float(e["r"]), float(e["R"]), float(e["a"]))
                       for e in doc["species"]})
