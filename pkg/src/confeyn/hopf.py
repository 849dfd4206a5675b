"""Connes-Kreimer Hopf algebra of 1PI Feynman graphs over Q.

The algebra is free commutative on isomorphism classes of 1PI graphs, graded
by the number of internal edges.  The coproduct on a generator is

    Delta(G) = G (x) 1 + 1 (x) G + sum_gamma gamma (x) G/gamma

summed over admissible subgraphs (disjoint unions of 1PI pieces with 1PI
quotient), extended multiplicatively; the antipode is the usual inductive
formula S(X) = -X - sum S(X') X'' on the reduced coproduct.  The grading
derivation Y and the Dynkin operator D = S * Y (convolution) provide the
renormalization-group machinery used by the Birkhoff module.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .feyngraph import FeynmanGraph, TheoryProfile

# A monomial is a sorted tuple of FeynmanGraph generators (empty tuple = 1).
Monomial = tuple[FeynmanGraph, ...]


def monomial(*graphs: FeynmanGraph) -> Monomial:
    for g in graphs:
        if not g.is_1pi():
            raise ValueError("Hopf generators must be 1PI graphs")
    return tuple(sorted(graphs, key=lambda g: g.canonical_key()))


def monomial_degree(mono: Monomial) -> int:
    return sum(g.degree() for g in mono)


class HopfElement:
    """Finite Q-linear combination of graph monomials."""

    def __init__(self, terms: dict[Monomial, Fraction] | None = None):
        self.terms: dict[Monomial, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[mono] = self.terms.get(mono, Fraction(0)) + c
            self.terms = {m: c for m, c in self.terms.items() if c}

    @classmethod
    def unit(cls) -> "HopfElement":
        return cls({(): Fraction(1)})

    @classmethod
    def zero(cls) -> "HopfElement":
        return cls()

    @classmethod
    def generator(cls, graph: FeynmanGraph) -> "HopfElement":
        return cls({monomial(graph): Fraction(1)})

    @classmethod
    def from_monomial(cls, mono: Monomial, coeff: Fraction = Fraction(1)) -> "HopfElement":
        return cls({mono: coeff})

    def __add__(self, other: "HopfElement") -> "HopfElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return HopfElement(out)

    def __sub__(self, other: "HopfElement") -> "HopfElement":
        return self + (-1) * other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return HopfElement({m: c * other for m, c in self.terms.items()})
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2, key=lambda g: g.canonical_key()))
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return HopfElement(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, HopfElement):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for m, c in sorted(self.terms.items(), key=lambda kv: (monomial_degree(kv[0]), str(kv[1]))):
            name = "*".join(g.label() for g in m) if m else "1"
            bits.append(f"{c}*{name}")
        return " + ".join(bits)

    def homogeneous_part(self, degree: int) -> "HopfElement":
        return HopfElement({m: c for m, c in self.terms.items()
                            if monomial_degree(m) == degree})

    def max_degree(self) -> int:
        return max((monomial_degree(m) for m in self.terms), default=0)


class TensorElement:
    """Element of H (x) H (or, with k factors, H^(x)k)."""

    def __init__(self, terms: dict[tuple[Monomial, ...], Fraction] | None = None, k: int = 2):
        self.k = k
        self.terms: dict[tuple[Monomial, ...], Fraction] = {}
        if terms:
            for key, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[key] = self.terms.get(key, Fraction(0)) + c
            self.terms = {m: c for m, c in self.terms.items() if c}

    @classmethod
    def single(cls, key: tuple[Monomial, ...], coeff: Fraction = Fraction(1)) -> "TensorElement":
        return cls({key: coeff}, k=len(key))

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return TensorElement(out, self.k)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TensorElement({m: c * other for m, c in self.terms.items()}, self.k)
        out: dict[tuple[Monomial, ...], Fraction] = {}
        for key1, c1 in self.terms.items():
            for key2, c2 in other.terms.items():
                key = tuple(tuple(sorted(a + b, key=lambda g: g.canonical_key()))
                            for a, b in zip(key1, key2))
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return TensorElement(out, self.k)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        bits = []
        for key, c in self.terms.items():
            names = " (x) ".join("*".join(g.label() for g in m) if m else "1" for m in key)
            bits.append(f"{c} * [{names}]")
        return " + ".join(bits) or "0"


class HopfAlgebra:
    """Coproduct / antipode engine with per-generator memoization.

    The theory profile feeds the admissible-subgraph enumeration; graphs are
    memoized by canonical form.
    """

    def __init__(self, theory: TheoryProfile | None = None):
        self.theory = theory or TheoryProfile()
        self._coproduct_gen: dict[tuple, TensorElement] = {}
        self._antipode: dict[tuple[tuple, ...], HopfElement] = {}

    # -- coproduct -----------------------------------------------------------

    def coproduct_generator(self, graph: FeynmanGraph) -> TensorElement:
        key = graph.canonical_key()
        cached = self._coproduct_gen.get(key)
        if cached is not None:
            return cached
        g_mono = monomial(graph)
        terms: dict[tuple[Monomial, ...], Fraction] = {
            (g_mono, ()): Fraction(1),
            ((), g_mono): Fraction(1),
        }
        for sel in graph.admissible_subgraphs(self.theory):
            parts = monomial(*(graph.component_graph(c) for c in sel.components))
            quotient = graph.contract(sel)
            key2 = (parts, monomial(quotient))
            terms[key2] = terms.get(key2, Fraction(0)) + 1
        out = TensorElement(terms)
        self._coproduct_gen[key] = out
        return out

    def coproduct(self, x: HopfElement | Monomial | FeynmanGraph) -> TensorElement:
        x = self._as_element(x)
        total = TensorElement(k=2)
        for mono, c in x.terms.items():
            term = TensorElement.single(((), ()))
            for g in mono:
                term = term * self.coproduct_generator(g)
            total = total + c * term
        return total

    def reduced_coproduct(self, mono: Monomial) -> TensorElement:
        """Delta(x) - x (x) 1 - 1 (x) x on a monomial."""
        full = self.coproduct(HopfElement.from_monomial(mono))
        trim = dict(full.terms)
        for key in [(mono, ()), ((), mono)]:
            trim[key] = trim.get(key, Fraction(0)) - 1
        return TensorElement(trim)

    def iterated_coproduct(self, x: HopfElement | Monomial, k: int) -> TensorElement:
        """Delta^(k-1): H -> H^(x)k (k >= 1), applied on the last slot."""
        x = self._as_element(x)
        if k == 1:
            return TensorElement({(m,): c for m, c in x.terms.items()}, k=1)
        prev = self.iterated_coproduct(x, k - 1)
        out: dict[tuple[Monomial, ...], Fraction] = {}
        for key, c in prev.terms.items():
            last = self.coproduct(HopfElement.from_monomial(key[-1]))
            for (a, b), c2 in last.terms.items():
                nk = key[:-1] + (a, b)
                out[nk] = out.get(nk, Fraction(0)) + c * c2
        return TensorElement(out, k)

    # -- counit, antipode, grading --------------------------------------------

    @staticmethod
    def counit(x: HopfElement | Monomial | FeynmanGraph) -> Fraction:
        x = HopfAlgebra._as_element(x)
        return x.terms.get((), Fraction(0))

    def antipode(self, x: HopfElement | Monomial | FeynmanGraph) -> HopfElement:
        x = self._as_element(x)
        total = HopfElement.zero()
        for mono, c in x.terms.items():
            total = total + c * self._antipode_monomial(mono)
        return total

    def _antipode_monomial(self, mono: Monomial) -> HopfElement:
        if not mono:
            return HopfElement.unit()
        key = tuple(g.canonical_key() for g in mono)
        cached = self._antipode.get(key)
        if cached is not None:
            return cached
        out = HopfElement.from_monomial(mono, Fraction(-1))
        for (left, right), c in self.reduced_coproduct(mono).terms.items():
            out = out - c * (self._antipode_monomial(left)
                             * HopfElement.from_monomial(right))
        self._antipode[key] = out
        return out

    @staticmethod
    def grading_op(x: HopfElement | Monomial | FeynmanGraph) -> HopfElement:
        """Y: scales each monomial by its degree."""
        x = HopfAlgebra._as_element(x)
        return HopfElement({m: c * monomial_degree(m) for m, c in x.terms.items()})

    def dynkin(self, x: HopfElement | Monomial | FeynmanGraph) -> HopfElement:
        """D = S * Y (convolution of antipode and grading): the graded-Hopf
        realization of the Dynkin idempotent."""
        x = self._as_element(x)
        total = HopfElement.zero()
        for (left, right), c in self.coproduct(x).terms.items():
            deg = monomial_degree(right)
            if deg == 0:
                continue
            total = total + (c * deg) * (self._antipode_monomial(left)
                                         * HopfElement.from_monomial(right))
        return total

    # -- convolution ------------------------------------------------------------

    def convolve(self, phi1: Callable, phi2: Callable,
                 x: HopfElement | Monomial | FeynmanGraph, target) -> object:
        """(phi1 * phi2)(x) = <phi1 (x) phi2, Delta(x)> in the target algebra.

        ``phi1``/``phi2`` map monomials to target values; ``target`` supplies
        zero()/add/mul via the algebra-model protocol.
        """
        x = self._as_element(x)
        total = target.zero()
        for (left, right), c in self.coproduct(x).terms.items():
            total = target.add(total, target.scale(
                target.mul(phi1(left), phi2(right)), c))
        return total

    @staticmethod
    def _as_element(x) -> HopfElement:
        if isinstance(x, HopfElement):
            return x
        if isinstance(x, FeynmanGraph):
            return HopfElement.generator(x)
        if isinstance(x, tuple):
            return HopfElement.from_monomial(x)
        raise TypeError(f"cannot interpret {type(x).__name__} as a Hopf element")


def generate_graph_family(max_degree: int = 4, with_legs: bool = True
                          ) -> list[FeynmanGraph]:
    """Deterministic family of small 1PI graphs (optionally with external
    legs), deduplicated by isomorphism; used by tests and the CLI examples."""
    bases: list[FeynmanGraph] = []
    bananas = {n: FeynmanGraph.build(2, [(0, 1)] * n) for n in (2, 3, 4)}
    bases.extend(bananas[n] for n in sorted(bananas) if n <= max_degree)
    if max_degree >= 3:
        bases.append(FeynmanGraph.build(3, [(0, 1), (1, 2), (0, 2)]))  # triangle
    if max_degree >= 4:
        bases.append(FeynmanGraph.build(4, [(0, 1), (1, 2), (2, 3), (0, 3)]))  # square
        bases.append(FeynmanGraph.build(3, [(0, 1), (0, 1), (0, 2), (2, 1)]))  # doubled triangle
        bases.append(FeynmanGraph.build(3, [(0, 1), (0, 1), (1, 2), (1, 2)]))  # eyeglasses
    family: list[FeynmanGraph] = []
    seen = set()
    for base in bases:
        variants = [base]
        if with_legs:
            nv = len(base.internal_vertices())
            variants.append(FeynmanGraph.build(
                nv, [(e.src, e.tgt) for e in base.edges], legs=[0]))
            variants.append(FeynmanGraph.build(
                nv, [(e.src, e.tgt) for e in base.edges], legs=[0, 1]))
            variants.append(FeynmanGraph.build(
                nv, [(e.src, e.tgt) for e in base.edges], legs=[0, 0]))
            if nv >= 3:
                variants.append(FeynmanGraph.build(
                    nv, [(e.src, e.tgt) for e in base.edges], legs=[0, 1, 2]))
        # dedupe by isomorphism class, keep the degree bound
        for g in variants:
            if g.degree() <= max_degree and not g.validate() and g.is_1pi():
                k = g.canonical_key()
                if k not in seen:
                    seen.add(k)
                    family.append(g)
    return family
