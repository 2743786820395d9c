"""Infinite-MPS study of the spin-1 XXZ chain with single-ion anisotropy.

Ground states come from two-site infinite DMRG; the d=3 Bell (CGLMP)
correlation between two spins is evaluated with a matrix product operator
and cross-checked against its decomposition into transverse spin-spin
correlations.  Exact diagonalization of short chains serves as an oracle.
"""

__version__ = "0.1.0"
