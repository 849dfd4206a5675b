"""Configuration-space Feynman amplitude machinery.

Subpackages cover exact special-function scalars, the Gegenbauer polynomial
engine, Bessel-potential propagators with independent oracles, per-edge
amplitude expansions, Feynman graph combinatorics, the Connes-Kreimer Hopf
algebra, weight -1 Rota-Baxter algebras, and Birkhoff factorization.
"""

__version__ = "0.1.0"
