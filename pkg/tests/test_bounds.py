import math
import random
from fractions import Fraction

import pytest

from virialkit.bounds import (
    DomainSpec,
    SpeciesDomain,
    check_coefficient_bounds,
    coefficient_sum_bound,
    density_domain,
    det_bound_constant,
    det_bound_exponent_exact,
    domain_spec_from_json,
    domain_spec_to_json,
    hypothesis_check,
    inverse_bound,
    make_domain_spec,
    virial_bound,
    z_of_rho_bound,
)
from virialkit.series import MPSeries, MultiIndex, Truncation
from virialkit.virial import PressureSeries, invert_recursive

WORKED = make_domain_spec([(1, 0.25, 1.0, 1.0)])


def e(*exps):
    return MultiIndex.from_exponents(exps)


def test_species_domain_validation():
    with pytest.raises(ValueError):
        SpeciesDomain(1.0, 0.5, 0.0)
    with pytest.raises(ValueError):
        SpeciesDomain(0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        SpeciesDomain(0.1, 1.0, -0.5)
    with pytest.raises(ValueError):
        DomainSpec({})


def test_det_bound_constant_zero_budget_is_one():
    spec = make_domain_spec([(1, 0.25, 1.0, 0.0), (2, 0.1, 0.3, 0.0)])
    assert det_bound_constant(spec) == 1.0


def test_det_bound_constant_worked_value():
    # u = 1/2, leading factor r/(u(R-r)) = 2/3, sqrt term = 1/2: C = e^(1/3)
    assert det_bound_constant(WORKED) == pytest.approx(math.exp(1.0 / 3.0), abs=1e-12)
    assert det_bound_exponent_exact(WORKED) == Fraction(1, 3)


def test_det_bound_constant_two_identical_species():
    spec = make_domain_spec([(1, 0.25, 1.0, 1.0), (2, 0.25, 1.0, 1.0)])
    # independent evaluation of the same closed form
    u2 = 0.25 / 1.0
    expected = math.exp((2 * 0.25 / (math.sqrt(u2) * 0.75)) * math.sqrt(2 * u2 * 1.0))
    assert det_bound_constant(spec) == pytest.approx(expected, abs=1e-12)


def test_det_bound_monotone_in_a_and_r():
    rng = random.Random(8)
    for _ in range(50):
        R = rng.uniform(0.5, 2.0)
        r = rng.uniform(0.05, 0.9) * R
        a = rng.uniform(0.0, 2.0)
        base = det_bound_constant(make_domain_spec([(1, r, R, a)]))
        assert det_bound_constant(make_domain_spec([(1, r, R, a + 0.3)])) >= base
        r2 = min(r * 1.2, 0.99 * R)
        assert det_bound_constant(make_domain_spec([(1, r2, R, a)])) >= base


def test_virial_bound_examples():
    C = det_bound_constant(WORKED)
    assert virial_bound(WORKED, 1.0, MultiIndex()) == pytest.approx(C)
    expected = C * (math.e / 0.25) ** 2
    assert virial_bound(WORKED, 1.0, e(2)) == pytest.approx(expected)
    assert expected == pytest.approx(165.0, abs=0.01)
    with pytest.raises(ValueError):
        virial_bound(WORKED, 1.0, e(0, 1))
    with pytest.raises(ValueError):
        virial_bound(WORKED, -1.0, e(1))


def test_virial_bound_increment_factor():
    C = det_bound_constant(WORKED)
    for n in (MultiIndex(), e(1), e(2)):
        ratio = virial_bound(WORKED, 2.0, n.incremented(1)) / virial_bound(WORKED, 2.0, n)
        assert ratio == pytest.approx(math.exp(1.0) / 0.25, rel=1e-12)
    # doubling r halves the per-unit factor once the constant is divided out
    spec2 = make_domain_spec([(1, 0.5, 1.0, 1.0)])
    unit1 = virial_bound(WORKED, 1.0, e(1)) / det_bound_constant(WORKED)
    unit2 = virial_bound(spec2, 1.0, e(1)) / det_bound_constant(spec2)
    assert unit2 == pytest.approx(unit1 / 2.0, rel=1e-12)


def test_inverse_bound_examples():
    C = det_bound_constant(WORKED)
    assert inverse_bound(WORKED, MultiIndex(), MultiIndex()) == pytest.approx(C)
    expected = C * math.exp(1.0 * (1 + 1)) / 0.25
    assert inverse_bound(WORKED, e(1), e(1)) == pytest.approx(expected)
    assert expected == pytest.approx(41.249, abs=0.001)
    # increasing any k_i multiplies by e^{a_i}
    assert inverse_bound(WORKED, e(1), e(2)) == \
        pytest.approx(inverse_bound(WORKED, e(1), e(1)) * math.exp(1.0), rel=1e-12)


def test_density_domain():
    d = density_domain(WORKED)
    assert d.radii[1] == pytest.approx(0.25 * math.exp(-1.0), abs=1e-12)
    assert d.contains({1: 0.0})
    assert d.contains({1: 0.05})
    assert not d.contains({1: 0.1})
    zero_budget = density_domain(make_domain_spec([(1, 0.25, 1.0, 0.0)]))
    assert zero_budget.radii[1] == 0.25
    # radii shrink strictly as a grows
    for a in (0.1, 0.5, 1.0, 2.0):
        smaller = density_domain(make_domain_spec([(1, 0.25, 1.0, a)])).radii[1]
        assert smaller < density_domain(make_domain_spec([(1, 0.25, 1.0, a - 0.05)])).radii[1]


def test_z_of_rho_bound():
    assert z_of_rho_bound(WORKED, {1: 0.0}, 1) == 0.0
    value = z_of_rho_bound(WORKED, {1: 0.01}, 1)
    expected = det_bound_constant(WORKED) * 0.01 * math.e / (1 - math.e * 0.01 / 0.25)
    assert value == pytest.approx(expected, rel=1e-12)
    assert value == pytest.approx(0.042565, abs=1e-5)
    # grows without bound near the edge of the density polydisk
    near = z_of_rho_bound(WORKED, {1: 0.25 * math.exp(-1) * 0.999999}, 1)
    assert near > 1e4
    with pytest.raises(ValueError):
        z_of_rho_bound(WORKED, {1: 0.25 * math.exp(-1)}, 1)


# -- hypothesis check -----------------------------------------------------------------


def pressure(terms, degree, species):
    return PressureSeries(MPSeries(terms, Truncation(degree, species)), "hand")


def test_hypothesis_check_ideal_gas_passes():
    p = pressure({e(1): 1, e(0, 1): 1}, 3, 2)
    spec = make_domain_spec([(1, 0.25, 1.0, 0.5), (2, 0.25, 1.0, 0.5)])
    report = hypothesis_check(p, spec, samples=100)
    assert report.passed
    for check in report.log_checks:
        assert check.max_log_abs == pytest.approx(0.0, abs=1e-12)
    assert report.coefficient_sum == pytest.approx(2.0)
    assert report.sqrt_ratio_sum == pytest.approx(2 * 0.5)
    assert report.ra2_sum == pytest.approx(2 * 0.25 * 0.25)


def test_hypothesis_check_worked_example():
    # dp/dz = 1 - 2z over |z| <= 1/4: the extreme |log| is log 2 at z = 1/4
    p = pressure({e(1): 1, e(2): -1}, 3, 1)
    spec = make_domain_spec([(1, 0.1, 0.25, 0.75)])
    report = hypothesis_check(p, spec, samples=400)
    assert report.passed
    assert report.log_checks[0].max_log_abs == pytest.approx(math.log(2.0), abs=1e-9)


def test_hypothesis_check_detects_violation():
    p = pressure({e(1): 1, e(2): -1}, 3, 1)
    spec = make_domain_spec([(1, 0.1, 0.25, 0.5)])
    report = hypothesis_check(p, spec, samples=400)
    assert not report.passed


def test_hypothesis_check_flags_vanishing_derivative():
    # dp/dz = 1 - 2z vanishes at z = 0.5 = R, which the deterministic grid
    # pins exactly: an automatic failure regardless of the budget
    p = pressure({e(1): 1, e(2): -1}, 3, 1)
    spec = make_domain_spec([(1, 0.1, 0.5, 10.0)])
    report = hypothesis_check(p, spec, samples=50, seed=1)
    assert report.log_checks[0].zero_found
    assert not report.passed


# -- coefficient audit -----------------------------------------------------------------


def test_audit_ideal_gas_trivially_passes():
    p = pressure({e(1): 1}, 4, 1)
    spec = WORKED
    report = check_coefficient_bounds(p, spec, invert_recursive(p))
    assert report.passed and not report.violations


def test_audit_worked_pressure_through_d6():
    p = pressure({e(1): 1, e(2): -1}, 6, 1)
    spec = make_domain_spec([(1, 0.25, 1.0, 0.75)])
    report = check_coefficient_bounds(p, spec, invert_recursive(p))
    assert report.passed
    assert report.sup_p == pytest.approx(coefficient_sum_bound(p, spec))
    assert all(entry.margin >= 0 for entry in report.entries)


def test_bound_report_bundles_everything():
    from virialkit.bounds import bound_report
    p = pressure({e(1): 1, e(2): -1}, 4, 1)
    spec = make_domain_spec([(1, 0.1, 0.25, 0.75)])
    report = bound_report(spec, p, invert_recursive(p),
                          indices=[e(1), e(2)], samples=50)
    assert report.constant >= 1.0
    assert len(report.per_n_bounds) == 2
    assert report.hypothesis.passed and report.audit.passed and report.passed
    doc = report.as_dict()
    assert doc["per_n_bounds"][0]["n"] == {"1": 1}
    bare = bound_report(spec)
    assert bare.hypothesis is None and bare.passed


def test_interaction_pipeline_end_to_end():
    # hard-rod mixture satisfying the convergence criterion: the sampled
    # pressure should then satisfy the domain hypotheses with budgets a*k
    from virialkit.virial import mc_pressure_series
    from virialkit.weights import HardRods1D, KpSpec, McParams, kp_check

    rods = HardRods1D({1: 1, 2: 2}, 40)
    radii = {k: 0.5 * math.exp(-2 * k) for k in (1, 2)}
    assert kp_check(rods, KpSpec(radii, a=1.0), 2, McParams(100)).passed

    p, _ = mc_pressure_series(rods, McParams(100_000, seed=5), Truncation(2, 2))
    spec = make_domain_spec([(k, radii[k] / 4, radii[k], 1.0 * k) for k in (1, 2)])
    report = hypothesis_check(p, spec, samples=200)
    assert report.passed
    audit = check_coefficient_bounds(p, spec, invert_recursive(p))
    assert audit.passed


def test_json_round_trip():
    doc = domain_spec_to_json(WORKED)
    assert doc == {"species": [{"i": 1, "r": 0.25, "R": 1.0, "a": 1.0}]}
    assert domain_spec_from_json(doc).species[1] == SpeciesDomain(0.25, 1.0, 1.0)
