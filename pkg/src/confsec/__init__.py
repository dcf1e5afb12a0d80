"""confsec: executable configuration-space sections and fixed-point certification.

Subpackages by theme:

- ``geometry``: model spaces, metrics, configurations, coordinate projections
- ``selfmaps``: catalog of fixed-point-free self-maps with numerical checks
- ``sections``: explicit (local) sections, cover verification, FPP verdicts
- ``finite``: exhaustive ground truth on finite topological spaces (posets)
- ``certificates``: cup-length and induced-map lower-bound certificates
- ``bounds``: interval-propagation engine for cat/TC/sec/secat quantities
- ``planner``: region-decomposed continuous motion planners with verification
- ``cli``: the ``confsec`` command-line tool
"""

__version__ = "0.1.0"
