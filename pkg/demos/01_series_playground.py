"""A tour of the truncated multivariate power-series engine.

Series live over finitely many species with a joint truncation (total degree
and species cap) and exact rational coefficients by default.
"""

from fractions import Fraction

from virialkit import (
    MPSeries,
    MultiIndex,
    Truncation,
    exp,
    log,
    reciprocal,
    series_to_json,
    substitute,
)

t = Truncation(degree=4, species=2)
z1 = MPSeries.variable(1, t)
z2 = MPSeries.variable(2, t)
one = MPSeries.one(t)

print("== arithmetic ==")
f = one + z1 + z1 * z2
g = one - z1
print("f      =", f)
print("g      =", g)
print("f * g  =", f * g)
print("df/dz1 =", f.diff(1))

print()
print("== exp and log are exact inverse pairs on rationals ==")
h = z1 + z2.scaled(Fraction(1, 3))
expanded = exp(h)
print("exp(h)           =", expanded)
recovered = log(expanded)
print("log(exp(h))      =", recovered.series, " (leading constant", recovered.leading, ")")
print("round trip exact :", recovered.series == h)

print()
print("== reciprocal via the geometric series ==")
r = reciprocal(one + z1 + z2)
print("1/(1+z1+z2) =", r)
print("product is one:", (one + z1 + z2) * r == one)

print()
print("== composition: plug zero-constant series into an outer series ==")
outer = MPSeries({MultiIndex({1: 2}): 1}, t)  # the monomial rho_1^2
family = {1: z1 + z1 * z1, 2: z2}
print("rho_1^2 at rho_1 = z1 + z1^2 :", substitute(outer, family))

print()
print("== JSON interchange (rationals as p/q strings) ==")
doc = series_to_json(h)
print(doc)
