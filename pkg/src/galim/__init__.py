"""Exact computational toolkit around mod-p Galois image types.

Subpackages cover exact and modular arithmetic (Bernoulli numbers, irregular
indices), imaginary quadratic class groups with exact cyclotomic theta series,
a Dickson-style classifier for subgroups of PGL2(Fq), the exceptional-image
bound calculus, modular curve genus/dimension formulas, and per-prime witness
reports with a deterministic CLI.
"""

__version__ = "0.1.0"

from . import arith, cyclotomic, dickson, dims, inertia, quadforms, witness  # noqa: F401
