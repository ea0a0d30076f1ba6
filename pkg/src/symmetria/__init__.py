"""Symmetry-adapted decomposition of quantum processes.

Decomposes finite-dimensional quantum processes into irreducible "process
modes" under SU(2) or Z_N symmetry, extracts invariant amplitudes and
orientation data, catalogs globally symmetric bipartite processes, simulates
repeatable catalytic-coherence protocols on a cyclic ladder, and gauges
2-symmetric processes from global to local symmetry on small lattices.
"""

__version__ = "0.1.0"
