"""Eisenstein-twisted zeta functions of binary cubic forms: class enumeration,
lattice shapes, Eisenstein series, Weyl sums and numerical checks of the
integral evaluations behind the residue table."""

__version__ = "0.1.0"
