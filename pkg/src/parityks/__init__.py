"""Exact engine for generalized parity proofs of the Kochen-Specker theorem.

Submodules:
    gf2core     bit-packed linear algebra over GF(2)
    weightdist  weight distributions, MacWilliams and coset transforms
    exactalg    exact matrices over Q(sqrt5)(i) and symplectic Paulis
    raysystems  ray systems, orthogonality graphs, basis (clique) search
    prooffinder constraint systems and parity-proof counting/search
    incidence   parity proofs on abstract incidence structures
    cli         command-line front end
"""

__version__ = "0.1.0"
