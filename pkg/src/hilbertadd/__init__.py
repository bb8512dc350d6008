"""Exact workbench for the Hilbert additive group scheme.

Subpackages:
  rings     -- exact coefficient rings (Z, Z/m, Q, Z[x..])
  binom     -- integer-valued polynomials, Hopf structure, binomial sequences
  witt      -- truncated big Witt vectors, ghosts, Frobenius, fixed points
  homalg    -- sparse integer matrices, Smith normal form, cohomology, towers
  em        -- weight-graded Eilenberg-MacLane cochain complexes and bar homology
  homotopy  -- symbolic calculator for affinization homotopy groups
  cli       -- command-line interface
"""

__version__ = "0.1.0"
