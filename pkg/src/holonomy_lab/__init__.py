"""Exact and numerical checks for torsion-free connections with holonomy Sl(2)SO(p,q).

Modules, bottom-up: ``exact_linalg`` (rational elimination), ``rep_core``
(representations), ``curvature`` (K, K^1, J_2), ``poisson`` (the perturbed
Lie-Poisson bracket), ``dynamics`` (flows on W*), ``reports`` and ``cli``.
"""

__version__ = "0.1.0"
