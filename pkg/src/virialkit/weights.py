"""Coloured-graph weights: interaction models, Monte Carlo cluster integrals,
synthetic block-factorizing models, and interaction-criteria checks.

Interaction models are rigid molecules (species, position, orientation) on a
periodic box with a symmetric pair energy; the weight of a coloured connected
graph is the normalized integral of the product of Mayer factors
zeta = exp(-U) - 1 over the graph's edges, with the first molecule pinned at
the origin by translation invariance.  Synthetic models assign exact rational
weights per two-connected block and extend to connected graphs by block
factorization.
"""

from __future__ import annotations

import math
import warnings
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .graphs import (
    Block,
    ColouredGraph,
    Graph,
    block_decomposition,
    canonical_coloured_key,
    graph_from_json,
    graph_to_json,
    is_connected,
)

SCHEME_PSEUDO = "pseudo-random"
SCHEME_LOW_DISCREPANCY = "low-discrepancy"


def _to_fraction(value) -> Fraction:
    """Exact rational from JSON-ish input; floats get decimal-string semantics."""
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value.replace("−", "-"))
    return Fraction(value)


@dataclass(frozen=True)
class Molecule:
    """A rigid molecule: species, position in the box, unit orientation.

    In one dimension the orientation manifold is a point and `orientation`
    is None.
    """

    species: int
    position: tuple[float, ...]
    orientation: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.species < 1:
            raise ValueError(f"species must be >= 1, got {self.species}")
        if self.orientation is not None:
            norm = math.sqrt(sum(c * c for c in self.orientation))
            if abs(norm - 1.0) > 1e-12:
                raise ValueError(f"orientation must be a unit vector, |o| = {norm}")


class PairPotential:
    """Symmetric, translation- and rotation-invariant pair energy on a torus.

    Subclasses implement `energy`; `energy_batch` has a generic loop fallback
    that vectorized models should override.
    """

    dimension: int
    box_length: float
    species: tuple[int, ...]

    def energy(self, m1: Molecule, m2: Molecule) -> float:
        raise NotImplementedError

    def energy_batch(self, k1: int, x1: np.ndarray, o1, k2: int, x2: np.ndarray, o2) -> np.ndarray:
        out = np.empty(len(x1))
        for idx in range(len(x1)):
            m1 = Molecule(k1, tuple(x1[idx]), None if o1 is None else tuple(o1[idx]))
            m2 = Molecule(k2, tuple(x2[idx]), None if o2 is None else tuple(o2[idx]))
            out[idx] = self.energy(m1, m2)
        return out

    def exact_abs_zeta_integral(self, k: int, l: int) -> Fraction | None:
        """Closed form of int over R^d of |zeta|, when the model has one."""
        return None


def zeta(u: PairPotential, m1: Molecule, m2: Molecule) -> float:
    """Mayer factor exp(-U) - 1; hard-core overlap (U = +inf) gives -1."""
    e = u.energy(m1, m2)
    if e == math.inf:
        return -1.0
    return math.exp(-e) - 1.0


def _zeta_batch(u: PairPotential, k1, x1, o1, k2, x2, o2) -> np.ndarray:
    return np.exp(-u.energy_batch(k1, x1, o1, k2, x2, o2)) - 1.0


def minimum_image(dx: np.ndarray, box_length: float) -> np.ndarray:
    """Componentwise minimum-image displacement on the torus [0, L)^d."""
    d = np.abs(dx) % box_length
    return np.minimum(d, box_length - d)


class HardRods1D(PairPotential):
    """1D hard rods: species k has rod length sigma_k; rods at periodic
    distance < (sigma_k + sigma_l)/2 overlap (U = +inf), otherwise U = 0."""

    dimension = 1

    def __init__(self, sigma: Mapping[int, object], box_length: object):
        self.sigma = {int(k): _to_fraction(v) for k, v in sigma.items()}
        for k, s in self.sigma.items():
            if s < 0:
                raise ValueError(f"rod length must be >= 0, got {s} for species {k}")
        self._L = _to_fraction(box_length)
        if self._L <= 0:
            raise ValueError(f"box length must be positive, got {self._L}")
        self.box_length = float(self._L)
        self.species = tuple(sorted(self.sigma))

    def _core(self, k: int, l: int) -> float:
        return float(self.sigma[k] + self.sigma[l]) / 2.0

    def energy(self, m1: Molecule, m2: Molecule) -> float:
        dx = abs(m1.position[0] - m2.position[0]) % self.box_length
        dx = min(dx, self.box_length - dx)
        return math.inf if dx < self._core(m1.species, m2.species) else 0.0

    def energy_batch(self, k1, x1, o1, k2, x2, o2) -> np.ndarray:
        d = minimum_image(x1[:, 0] - x2[:, 0], self.box_length)
        return np.where(d < self._core(k1, k2), np.inf, 0.0)

    def exact_abs_zeta_integral(self, k: int, l: int) -> Fraction:
        return self.sigma[k] + self.sigma[l]


class CustomPairPotential(PairPotential):
    """Wrap a plain python energy function (Molecule, Molecule) -> float."""

    def __init__(self, fn: Callable[[Molecule, Molecule], float], dimension: int,
                 box_length: float, species: Sequence[int]):
        if dimension not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {dimension}")
        self._fn = fn
        self.dimension = dimension
        self.box_length = float(box_length)
        self.species = tuple(species)

    def energy(self, m1: Molecule, m2: Molecule) -> float:
        return self._fn(m1, m2)


def pair_integral_exact(model: HardRods1D, k: int, l: int) -> Fraction:
    """int over the box of zeta(X_k at 0, X_l at x) dx = -(sigma_k + sigma_l).

    Exact for 1D hard rods; needs L > sigma_k + sigma_l so the overlap
    interval does not wrap around.
    """
    if not isinstance(model, HardRods1D):
        raise ValueError("exact pair integral is implemented for 1D hard rods")
    width = model.sigma[k] + model.sigma[l]
    if model._L <= width:
        raise ValueError(f"box length {model._L} must exceed sigma_{k} + sigma_{l} = {width}")
    return -width


@dataclass(frozen=True)
class McParams:
    """Monte Carlo controls; sample streams are reproducible from the seed."""

    sample_count: int
    seed: int = 0
    scheme: str = SCHEME_PSEUDO

    def __post_init__(self):
        if self.sample_count < 2:
            raise ValueError("sample_count must be >= 2 so the variance is estimable")
        if self.scheme not in (SCHEME_PSEUDO, SCHEME_LOW_DISCREPANCY):
            raise ValueError(f"unknown sampling scheme {self.scheme!r}")


class _UnitSampler:
    """Chunked uniform samples on [0,1)^dims for either sampling scheme."""

    def __init__(self, params: McParams, dims: int):
        self.dims = dims
        if params.scheme == SCHEME_PSEUDO:
            self._rng = np.random.default_rng(params.seed)
            self._sobol = None
        else:
            from scipy.stats import qmc
            self._sobol = qmc.Sobol(d=max(dims, 1), scramble=True, seed=params.seed)

    def draw(self, count: int) -> np.ndarray:
        if self._sobol is None:
            return self._rng.random((count, self.dims))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)  # Sobol balance note
            return self._sobol.random(count)[:, : self.dims]


def _orientation_dims(d: int) -> int:
    return {1: 0, 2: 1, 3: 2}[d]


def _orientations_from_unit(u: np.ndarray, d: int) -> np.ndarray | None:
    """Map uniform unit-cube coordinates to uniform points on S^(d-1)."""
    if d == 1:
        return None
    if d == 2:
        theta = 2.0 * math.pi * u[:, 0]
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    z = 2.0 * u[:, 0] - 1.0
    phi = 2.0 * math.pi * u[:, 1]
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def weight_mc(g: ColouredGraph, u: PairPotential, p: McParams) -> tuple[float, float]:
    """Monte Carlo estimate of the cluster integral of a coloured connected graph.

    Returns (estimate, stderr).  Translation invariance pins molecule 1 at the
    origin, removing the 1/V normalisation together with one position
    integral; the orientation measure is the normalized uniform measure, so
    orientations carry no volume factor.  Size-1 graphs have weight exactly 1.
    """
    n = g.graph.n
    if n == 1:
        return 1.0, 0.0
    if n < 1 or not is_connected(g.graph):
        raise ValueError("cluster weights are defined for connected graphs")

    d = u.dimension
    L = float(u.box_length)
    odims = _orientation_dims(d)
    pos_cols = (n - 1) * d
    dims = pos_cols + n * odims
    sampler = _UnitSampler(p, dims)
    edges = g.graph.sorted_edges()

    total = 0.0
    total_sq = 0.0
    remaining = p.sample_count
    chunk_size = 1 << 16
    while remaining > 0:
        m = min(chunk_size, remaining)
        unit = sampler.draw(m)
        positions = [np.zeros((m, d))]  # molecule 1 at the origin
        for v in range(1, n):
            positions.append(L * unit[:, (v - 1) * d: v * d])
        orientations: list[np.ndarray | None] = []
        for v in range(n):
            if odims == 0:
                orientations.append(None)
            else:
                cols = unit[:, pos_cols + v * odims: pos_cols + (v + 1) * odims]
                orientations.append(_orientations_from_unit(cols, d))
        values = np.ones(m)
        for i, j in edges:
            values *= _zeta_batch(u, g.colours[i - 1], positions[i - 1], orientations[i - 1],
                                  g.colours[j - 1], positions[j - 1], orientations[j - 1])
        total += float(values.sum())
        total_sq += float((values * values).sum())
        remaining -= m

    count = p.sample_count
    mean = total / count
    var = max(total_sq - count * mean * mean, 0.0) / (count - 1)
    scale = L ** (d * (n - 1))
    return scale * mean, scale * math.sqrt(var / count)


# -- synthetic block-factorizing models --------------------------------------


class SyntheticBlockModel:
    """Exact rational weights defined on two-connected blocks, extended to all
    connected coloured graphs by block factorization.

    Weights are keyed on the canonical form of (block, restricted colouring),
    which enforces invariance under colour-preserving relabellings.  A model
    may carry a fallback rule that synthesizes (and memoizes) a weight for
    unknown canonical keys; without one, a missing block weight is an error.
    """

    field = "rational"
    block_factorizing = True

    def __init__(self, species_count: int,
                 blocks: Sequence[tuple[ColouredGraph, object]] = (),
                 fallback: Callable[[tuple], Fraction] | None = None,
                 default_weight=None):
        if species_count < 1:
            raise ValueError("species_count must be >= 1")
        self.species_count = species_count
        self._weights: dict[tuple, Fraction] = {}
        self._fallback = fallback
        self.default_weight = None if default_weight is None else _to_fraction(default_weight)
        for cg, w in blocks:
            self.add_block(cg, w)

    def add_block(self, cg: ColouredGraph, weight) -> None:
        from .graphs import is_two_connected
        if not is_two_connected(cg.graph):
            raise ValueError("block weights are defined on two-connected graphs")
        key = canonical_coloured_key(cg.graph.n, cg.graph.to_mask(), cg.colours)
        self._weights[key] = _to_fraction(weight)

    @classmethod
    def from_edge_weights(cls, species_count: int,
                          edge_weights: Mapping[tuple[int, int], object],
                          ) -> SyntheticBlockModel:
        """The default model: only the single-edge block carries weight, one
        value per unordered colour pair; every other block weighs 0."""
        model = cls(species_count, default_weight=0)
        for (k, l), w in edge_weights.items():
            cg = ColouredGraph(Graph.from_edges(2, [(1, 2)]), (k, l))
            model.add_block(cg, w)
        return model

    @classmethod
    def random(cls, seed: int, species_count: int,
               low: int = -5, high: int = 5) -> SyntheticBlockModel:
        """Model with a deterministic seeded fallback: every canonical block
        key gets a rational weight in [low, high] on first use."""

        def draw(key: tuple) -> Fraction:
            digest = zlib.crc32(repr((seed, key)).encode())
            rng = np.random.default_rng(digest)
            den = int(rng.integers(1, 9))
            num = int(rng.integers(low * den, high * den + 1))
            return Fraction(num, den)

        return cls(species_count, fallback=draw)

    def block_weight(self, size: int, mask: int, colours: tuple[int, ...]) -> Fraction:
        return self.weight_for_canonical_key(canonical_coloured_key(size, mask, colours))

    def weight_for_canonical_key(self, key: tuple) -> Fraction:
        w = self._weights.get(key)
        if w is None:
            if self._fallback is not None:
                w = self._fallback(key)
            elif self.default_weight is not None:
                w = self.default_weight
            else:
                raise ValueError(f"no block weight for canonical key {key}")
            self._weights[key] = w
        return w

    def weight_of_block(self, b: Block, colours: tuple[int, ...]) -> Fraction:
        restricted = tuple(colours[v - 1] for v in b.vertices)
        return self.block_weight(b.size, b.relabelled_mask(), restricted)

    def connected_weight(self, graph: Graph, colours: tuple[int, ...]) -> Fraction:
        return synthetic_weight(ColouredGraph(graph, colours), self)


def synthetic_weight(g: ColouredGraph, m: SyntheticBlockModel) -> Fraction:
    """Weight of a connected coloured graph under a block-factorizing model:
    1 for size one, otherwise the product of its blocks' weights."""
    if g.graph.n == 1:
        return Fraction(1)
    if not is_connected(g.graph):
        raise ValueError("synthetic weights are defined for connected graphs")
    out = Fraction(1)
    for b in block_decomposition(g.graph).blocks:
        out *= m.weight_of_block(b, g.colours)
    return out


class McWeightSource:
    """Adapter: Monte Carlo cluster integrals as a (float-field) weight source.

    Each coloured graph gets its own seed derived from the base seed and the
    graph, so results do not depend on evaluation order.  Rigid molecules
    factorize over blocks, hence `block_factorizing` is True.
    """

    field = "float"
    block_factorizing = True

    def __init__(self, potential: PairPotential, params: McParams):
        self.potential = potential
        self.params = params
        self.errors: dict[tuple[int, tuple], float] = {}

    def _params_for(self, graph: Graph, colours: tuple[int, ...]) -> McParams:
        digest = zlib.crc32(repr((self.params.seed, graph.n, graph.to_mask(), colours)).encode())
        return McParams(self.params.sample_count, int(digest), self.params.scheme)

    def connected_weight_with_error(self, graph: Graph,
                                    colours: tuple[int, ...]) -> tuple[float, float]:
        if graph.n == 1:
            return 1.0, 0.0
        cg = ColouredGraph(graph, colours)
        est, err = weight_mc(cg, self.potential, self._params_for(graph, colours))
        self.errors[(graph.to_mask(), colours)] = err
        return est, err

    def connected_weight(self, graph: Graph, colours: tuple[int, ...]) -> float:
        return self.connected_weight_with_error(graph, colours)[0]


# -- interaction-criteria checks ----------------------------------------------


@dataclass(frozen=True)
class KpSpec:
    """Radii and constants for the convergence criterion: per-species radii
    R_k > 0, a slope a > 0 for the right-hand side a*k, and the stability
    constant b >= 0."""

    radii: Mapping[int, float]
    a: float
    b: float = 0.0

    def __post_init__(self):
        if any(r <= 0 for r in self.radii.values()):
            raise ValueError("all radii must be positive")
        if self.a <= 0:
            raise ValueError("a must be positive")
        if self.b < 0:
            raise ValueError("b must be nonnegative")


@dataclass
class KpEntry:
    species: int
    lhs: float
    rhs: float
    passed: bool


@dataclass
class KpReport:
    entries: list[KpEntry]
    summability_sum: float
    integral_domain: str  # "R^d (exact)" or "box (monte-carlo)"
    passed: bool

    def as_dict(self) -> dict:
        return {
            "entries": [{"species": e.species, "lhs": e.lhs, "rhs": e.rhs,
                         "passed": e.passed} for e in self.entries],
            "summability_sum": self.summability_sum,
            "integral_domain": self.integral_domain,
            "passed": self.passed,
        }


def _abs_zeta_integral_mc(u: PairPotential, k: int, l: int, quadrature: McParams) -> float:
    """Box integral of |zeta| between a pinned molecule of species k and a
    uniformly placed molecule of species l (numeric fallback)."""
    d = u.dimension
    L = float(u.box_length)
    odims = _orientation_dims(d)
    dims = d + 2 * odims
    sampler = _UnitSampler(McParams(quadrature.sample_count,
                                    quadrature.seed ^ zlib.crc32(f"kp:{k}:{l}".encode()),
                                    quadrature.scheme), dims)
    total = 0.0
    remaining = quadrature.sample_count
    while remaining > 0:
        m = min(1 << 16, remaining)
        unit = sampler.draw(m)
        x2 = L * unit[:, :d]
        o1 = _orientations_from_unit(unit[:, d: d + odims], d) if odims else None
        o2 = _orientations_from_unit(unit[:, d + odims: d + 2 * odims], d) if odims else None
        z = _zeta_batch(u, k, np.zeros((m, d)), o1, l, x2, o2)
        total += float(np.abs(z).sum())
        remaining -= m
    return (L ** d) * total / quadrature.sample_count


def kp_check(u: PairPotential, spec: KpSpec, species_cap: int,
             quadrature: McParams) -> KpReport:
    """Per-species check of the convergence criterion under the species cap:
    sum_{k'<=S} R_{k'} e^{(a+3b)k'} * int |zeta| <= a*k, reported per k <= S,
    together with the (partial) summability sum.  Report-only."""
    missing = [k for k in range(1, species_cap + 1) if k not in spec.radii]
    if missing:
        raise ValueError(f"spec has no radius for species {missing}")

    exact = all(u.exact_abs_zeta_integral(k, l) is not None
                for k in range(1, species_cap + 1) for l in range(1, species_cap + 1))
    domain = "R^d (exact)" if exact else "box (monte-carlo)"

    def integral(k: int, l: int) -> float:
        if exact:
            return float(u.exact_abs_zeta_integral(k, l))
        return _abs_zeta_integral_mc(u, k, l, quadrature)

    growth = {kp: spec.radii[kp] * math.exp((spec.a + 3.0 * spec.b) * kp)
              for kp in range(1, species_cap + 1)}
    entries = []
    for k in range(1, species_cap + 1):
        lhs = sum(growth[kp] * integral(k, kp) for kp in range(1, species_cap + 1))
        rhs = spec.a * k
        entries.append(KpEntry(k, lhs, rhs, lhs <= rhs * (1.0 + 1e-12)))
    return KpReport(entries, sum(growth.values()), domain, all(e.passed for e in entries))


@dataclass
class StabilityViolation:
    kind: str  # "configuration" or "pair"
    species: tuple[int, ...]
    lhs: float
    rhs: float


@dataclass
class StabilityReport:
    b: float
    configurations_checked: int
    pairs_checked: int
    violations: list[StabilityViolation]
    passed: bool

    def as_dict(self) -> dict:
        return {
            "b": self.b,
            "configurations_checked": self.configurations_checked,
            "pairs_checked": self.pairs_checked,
            "violations": [{"kind": v.kind, "species": list(v.species),
                            "lhs": v.lhs, "rhs": v.rhs} for v in self.violations],
            "passed": self.passed,
        }


def stability_check(u: PairPotential, b: float, trials: McParams, max_n: int,
                    species: Sequence[int] | None = None) -> StabilityReport:
    """Sample random configurations and report violations of the stability
    bounds prod |1 + zeta| <= prod e^{b k_i} and |1 + zeta| <= e^{b min(k,l)}.

    A sampling check, not a proof: it can only falsify.  Report-only.
    """
    if max_n > 8:
        raise ValueError("stability sampling capped at configurations of 8 molecules")
    if max_n < 2:
        raise ValueError("need configurations of at least 2 molecules")
    pool = tuple(species) if species is not None else u.species
    if not pool:
        raise ValueError("no species to sample")
    rng = np.random.default_rng(trials.seed)
    d = u.dimension
    L = float(u.box_length)
    tol = 1.0 + 1e-9

    def random_molecule(k: int) -> Molecule:
        pos = tuple(float(c) for c in rng.random(d) * L)
        if d == 1:
            return Molecule(k, pos)
        o = _orientations_from_unit(rng.random((1, _orientation_dims(d))), d)[0]
        return Molecule(k, pos, tuple(float(c) for c in o))

    violations: list[StabilityViolation] = []
    pairs_checked = 0
    for _ in range(trials.sample_count):
        n = int(rng.integers(2, max_n + 1))
        ks = [int(pool[rng.integers(0, len(pool))]) for _ in range(n)]
        mols = [random_molecule(k) for k in ks]
        prod = 1.0
        for i in range(n):
            for j in range(i + 1, n):
                f = abs(1.0 + zeta(u, mols[i], mols[j]))
                prod *= f
                pair_rhs = math.exp(b * min(ks[i], ks[j]))
                pairs_checked += 1
                if f > pair_rhs * tol and len(violations) < 20:
                    violations.append(StabilityViolation("pair", (ks[i], ks[j]), f, pair_rhs))
        rhs = math.exp(b * sum(ks))
        if prod > rhs * tol and len(violations) < 20:
            violations.append(StabilityViolation("configuration", tuple(ks), prod, rhs))
    return StabilityReport(b, trials.sample_count, pairs_checked, violations, not violations)


# -- model JSON ----------------------------------------------------------------


def model_to_json(model) -> dict:
    if isinstance(model, HardRods1D):
        return {"type": "hard_rods_1d",
                "sigma": {str(k): float(v) for k, v in sorted(model.sigma.items())},
                "L": float(model.box_length)}
    if isinstance(model, SyntheticBlockModel):
        blocks = []
        for (size, colours, mask), w in sorted(model._weights.items(),
                                               key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
            g = Graph.from_mask(size, mask)
            blocks.append({"graph": graph_to_json(g), "colours": list(colours), "w": str(w)})
        doc = {"type": "synthetic", "species": model.species_count, "blocks": blocks}
        if model.default_weight is not None:
            doc["default_w"] = str(model.default_weight)
        return doc
    raise ValueError(f"cannot serialize model of type {type(model).__name__}")


def model_from_json(doc: Mapping):
    kind = doc.get("type")
    if kind == "hard_rods_1d":
        return HardRods1D({int(k): v for k, v in doc["sigma"].items()}, doc["L"])
    if kind == "synthetic":
        blocks = []
        species = int(doc.get("species", 0))
        for entry in doc.get("blocks", ()):
            g = graph_from_json(entry["graph"])
            colours = tuple(int(c) for c in entry["colours"])
            species = max(species, max(colours, default=1))
            blocks.append((ColouredGraph(g, colours), entry["w"]))
        fallback = None
        if "random_fallback" in doc:
            fb = doc["random_fallback"]
            base = SyntheticBlockModel.random(int(fb["seed"]), max(species, 1),
                                              int(fb.get("low", -5)), int(fb.get("high", 5)))
            fallback = base._fallback
        return SyntheticBlockModel(max(species, 1), blocks, fallback=fallback,
                                   default_weight=doc.get("default_w"))
    raise ValueError(f"unknown model type {kind!r}")
