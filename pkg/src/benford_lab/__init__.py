"""Leading-digit statistics of dynamical systems.

Subpackages by theme: exact big-integer mantissa machinery
(:mod:`~benford_lab.core_numeric`), digit histograms and discrepancy
(:mod:`~benford_lab.benford_stats`), equidistribution diagnostics
(:mod:`~benford_lab.equidist`), the 3x+1 / (d,g,h) iteration engine
(:mod:`~benford_lab.collatz`), certified zeta evaluation and line scans
(:mod:`~benford_lab.zeta`), Haar-unitary characteristic polynomials
(:mod:`~benford_lab.rmt`), and the command-line front end
(:mod:`~benford_lab.cli`).
"""

__version__ = "0.1.0"

from . import benford_stats, collatz, core_numeric, equidist, rmt, zeta  # noqa: F401,E402
