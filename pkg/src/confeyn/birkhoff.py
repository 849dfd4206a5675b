"""Birkhoff factorization of Hopf-algebra characters into Rota-Baxter targets.

A character phi: H -> R (R a weight -1 Rota-Baxter algebra) factors as

    phi = (phi_- o S) * phi_+

with the counterterm and renormalized parts built inductively on the grading:

    phi_-(X) = -T( phi(X) + sum phi_-(X') phi(X'') )
    phi_+(X) = (1-T)( phi(X) + sum phi_-(X') phi(X'') )

where the sum runs over the reduced coproduct.  The weight -1 relation makes
both phi_- and phi_+ algebra morphisms again (tested, not assumed).

The renormalization group enters through the Dynkin operator D = S * Y:
beta = phi_- o D, and phi_- is recovered from the graded pieces of beta by
the universal singular frame

    phi_- = sum_{n >= 0, k_i > 0} beta_{k_1} * ... * beta_{k_n}
            / (k_1 (k_1+k_2) ... (k_1+...+k_n)).
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Callable

from .exact import ExactScalar
from .feyngraph import Edge, FeynmanGraph
from .hopf import HopfAlgebra, HopfElement, Monomial, monomial_degree
from .rotabaxter import (MultiLogAlgebra, MultiLogForm, LogForm, diagonal_label,
                         divisor_labels, separation_label)


class Character:
    """Multiplicative unital map from the Hopf algebra into a target algebra,
    defined by its values on generators and memoized on monomials."""

    def __init__(self, hopf: HopfAlgebra, target,
                 gen_rule: Callable[[FeynmanGraph], object], name: str = "phi"):
        self.hopf = hopf
        self.target = target
        self.gen_rule = gen_rule
        self.name = name
        self._memo: dict[tuple, object] = {}

    def on_monomial(self, mono: Monomial):
        key = tuple(g.canonical_key() for g in mono)
        cached = self._memo.get(key)
        if cached is None:
            value = self.target.one()
            for g in mono:
                value = self.target.mul(value, self.gen_rule(g))
            self._memo[key] = cached = value
        return cached

    def __call__(self, x):
        if isinstance(x, FeynmanGraph):
            x = HopfElement.generator(x)
        elif isinstance(x, tuple):
            x = HopfElement.from_monomial(x)
        total = self.target.zero()
        for mono, c in x.terms.items():
            total = self.target.add(total, self.target.scale(self.on_monomial(mono), c))
        return total


class CounitCharacter(Character):
    """epsilon followed by the unit of the target."""

    def __init__(self, hopf: HopfAlgebra, target):
        super().__init__(hopf, target, lambda g: target.zero(), name="eps")

    def on_monomial(self, mono: Monomial):
        return self.target.one() if not mono else self.target.zero()


class BirkhoffPair:
    """phi_- and phi_+ of a Birkhoff factorization, computed lazily by the
    Connes-Kreimer recursion with memoization on canonical monomials."""

    def __init__(self, phi: Character):
        self.phi = phi
        self.hopf = phi.hopf
        self.target = phi.target
        self._prepared: dict[tuple, object] = {}

    def _prepare(self, mono: Monomial):
        """phi(X) + sum phi_-(X') phi(X'') over the reduced coproduct."""
        key = tuple(g.canonical_key() for g in mono)
        cached = self._prepared.get(key)
        if cached is not None:
            return cached
        t = self.target
        value = self.phi.on_monomial(mono)
        for (left, right), c in self.hopf.reduced_coproduct(mono).terms.items():
            value = t.add(value, t.scale(
                t.mul(self.minus_on_monomial(left), self.phi.on_monomial(right)), c))
        self._prepared[key] = value
        return value

    def minus_on_monomial(self, mono: Monomial):
        if not mono:
            return self.target.one()
        return self.target.scale(self.target.T(self._prepare(mono)), Fraction(-1))

    def plus_on_monomial(self, mono: Monomial):
        if not mono:
            return self.target.one()
        prepared = self._prepare(mono)
        t = self.target
        return t.add(prepared, t.scale(t.T(prepared), Fraction(-1)))

    def _linear(self, x, on_mono):
        if isinstance(x, FeynmanGraph):
            x = HopfElement.generator(x)
        elif isinstance(x, tuple):
            x = HopfElement.from_monomial(x)
        t = self.target
        total = t.zero()
        for mono, c in x.terms.items():
            total = t.add(total, t.scale(on_mono(mono), c))
        return total

    def phi_minus(self, x):
        return self._linear(x, self.minus_on_monomial)

    def phi_plus(self, x):
        return self._linear(x, self.plus_on_monomial)

    def factorization_lhs(self, x):
        """(phi_- o S) * phi_+ evaluated at x; recovers phi(x)."""
        return self.hopf.convolve(
            lambda m: self.phi_minus(self.hopf.antipode(HopfElement.from_monomial(m))),
            self.plus_on_monomial, x, self.target)


def birkhoff_factorize(phi: Character, up_to_degree: int | None = None) -> BirkhoffPair:
    """Construct the factorization; with ``up_to_degree`` the recursion is
    exercised eagerly on all memoized generator degrees (it remains lazy and
    total on graded elements either way)."""
    pair = BirkhoffPair(phi)
    return pair


def renormalized_value(pair: BirkhoffPair, graph: FeynmanGraph):
    """phi_+(Gamma): the renormalized amplitude; polar-free in RB targets."""
    return pair.phi_plus(graph)


# ---------------------------------------------------------------------------
# Toy geometric character into the multi-space log-form algebra
# ---------------------------------------------------------------------------


def _stable_rational(*parts, lo: int = -6, hi: int = 6) -> Fraction:
    blob = json.dumps(parts, sort_keys=True, default=str).encode()
    h = int.from_bytes(hashlib.sha256(blob).digest()[:8], "big")
    num = lo + h % (hi - lo + 1)
    den = 1 + (h >> 16) % 5
    if num == 0:
        num = 1
    return Fraction(num, den)


def _canonical_representative(graph: FeynmanGraph) -> FeynmanGraph:
    """Rebuild the graph from its canonical form so the toy rule depends only
    on the isomorphism class."""
    flags, edges = graph.canonical_key()
    vertices = {i: bool(flag) for i, flag in enumerate(flags)}
    return FeynmanGraph(vertices, [Edge(a, b, internal) for (a, b, internal) in edges])


def toy_feynman_character(hopf: HopfAlgebra, n_vertices: int, k_external: int,
                          rule_seed: int) -> Character:
    """Deterministic stand-in for the regularized-form assignment Gamma -> eta.

    eta_Gamma lives on the space labeled by the internal-edge count; its polar
    blocks pair the diagonal label of the vertex set of each 1PI subgraph
    gamma of Gamma with the matching separation-at-infinity label (so blocks
    have even cardinality), with hash-seeded rational residues, plus a seeded
    regular part.  Raises if a graph needs more vertices than the configured
    divisor budget.
    """
    target = MultiLogAlgebra()

    def eta(graph: FeynmanGraph) -> MultiLogForm:
        canon = _canonical_representative(graph)
        internal = canon.internal_vertices()
        if len(internal) > n_vertices:
            raise ValueError(
                f"divisor set too small: graph has {len(internal)} internal vertices, "
                f"budget is {n_vertices}")
        space = canon.degree()
        renumber = {v: i + 1 for i, v in enumerate(internal)}
        key = canon.canonical_key()
        polar: dict[frozenset, ExactScalar] = {}
        for subset in _one_pi_subgraph_vertex_sets(canon):
            I = frozenset(renumber[v] for v in subset)
            block = frozenset({diagonal_label(I), separation_label("inf", I)})
            coeff = _stable_rational(rule_seed, key, sorted(I), "polar")
            polar[block] = (polar.get(block, ExactScalar.zero())
                            + ExactScalar.from_rational(coeff))
        regular = {
            (): ExactScalar.from_rational(_stable_rational(rule_seed, key, "const")),
            ((separation_label("inf", frozenset({1})), 1),):
                ExactScalar.from_rational(_stable_rational(rule_seed, key, "lin")),
        }
        ambient = divisor_labels(max(space, len(internal)), k_external)
        return MultiLogForm.from_logform(LogForm(space, polar, regular, ambient))

    return Character(hopf, target, eta, name=f"toy[{rule_seed}]")


def _one_pi_subgraph_vertex_sets(graph: FeynmanGraph) -> list[frozenset[int]]:
    """Vertex sets of the connected 1PI internal edge subsets (the graph
    itself included); these index the toy character's polar blocks."""
    from itertools import combinations
    internal = graph.internal_edge_indices()
    seen: set[frozenset[int]] = set()
    for size in range(2, len(internal) + 1):
        for subset in combinations(internal, size):
            comps = graph.edge_components(frozenset(subset))
            if len(comps) != 1:
                continue
            comp = comps[0]
            if graph.component_graph(comp).is_1pi():
                verts = frozenset(v for i in comp
                                  for v in (graph.edges[i].src, graph.edges[i].tgt))
                seen.add(verts)
    return sorted(seen, key=sorted)


# ---------------------------------------------------------------------------
# Renormalization group: beta function and universal singular frame
# ---------------------------------------------------------------------------


class BetaFunction:
    """beta = phi_- o D with D the Dynkin operator S * Y."""

    def __init__(self, pair: BirkhoffPair, up_to_degree: int):
        self.pair = pair
        self.hopf = pair.hopf
        self.target = pair.target
        self.up_to_degree = up_to_degree

    def __call__(self, x):
        return self.pair.phi_minus(self.hopf.dynkin(x))

    def on_monomial(self, mono: Monomial):
        return self(HopfElement.from_monomial(mono))

    def graded(self, k: int, mono: Monomial):
        """beta_k: beta restricted to the degree-k homogeneous piece."""
        if monomial_degree(mono) != k:
            return self.target.zero()
        return self.on_monomial(mono)


def beta_function(pair: BirkhoffPair, up_to_degree: int = 3) -> BetaFunction:
    return BetaFunction(pair, up_to_degree)


def _compositions(total: int):
    if total == 0:
        yield ()
        return
    for first in range(1, total + 1):
        for rest in _compositions(total - first):
            yield (first,) + rest


class FrameCharacter:
    """The universal-frame series evaluated degreewise (finite in each degree)."""

    def __init__(self, beta: BetaFunction):
        self.beta = beta
        self.hopf = beta.hopf
        self.target = beta.target

    def on_monomial(self, mono: Monomial):
        t = self.target
        degree = monomial_degree(mono)
        if degree == 0:
            return t.one()
        total = t.zero()
        for comp in _compositions(degree):
            n = len(comp)
            denom = Fraction(1)
            acc = 0
            for k in comp:
                acc += k
                denom *= acc
            spread = self.hopf.iterated_coproduct(HopfElement.from_monomial(mono), n)
            for key, c in spread.terms.items():
                if tuple(monomial_degree(m) for m in key) != comp:
                    continue
                value = t.one()
                for m in key:
                    value = t.mul(value, self.beta.on_monomial(m))
                total = t.add(total, t.scale(value, c / denom))
        return total

    def __call__(self, x):
        if isinstance(x, FeynmanGraph):
            x = HopfElement.generator(x)
        elif isinstance(x, tuple):
            x = HopfElement.from_monomial(x)
        t = self.target
        total = t.zero()
        for mono, c in x.terms.items():
            total = t.add(total, t.scale(self.on_monomial(mono), c))
        return total


def universal_frame(beta: BetaFunction, up_to_degree: int = 3) -> FrameCharacter:
    """Inverse of the Dynkin bijection: reconstructs phi_- from beta."""
    return FrameCharacter(beta)
