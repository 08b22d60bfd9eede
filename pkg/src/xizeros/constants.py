"""Package-wide defaults.

Every tunable default used by the library and the command line lives here so
that ``xizeros --print-defaults`` can show a single authoritative table.
"""

# quadrature
ABS_TOL = 0.0
REL_TOL = 1e-10
MAX_EVALS = 16384
T_CUTOFF = 6.0

# weight function phi: number of product factors kept
PHI_TERMS = 12

# zero location and counting
BETA = 3.0
SCAN_STEP = 0.05
LINE_TOL = 1e-9
DEDUP_TOL = 1e-8
BISECT_TOL = 1e-10
CLUSTER_TOL = 1e-8
SNAP_TOL = 0.15
MAX_DILATIONS = 8
MULTIPLICITY_RADIUS = 1e-6
CROWDED_RADIUS = 4e-6

# explicit stand-ins for the unspecified O(1) / O(log T) constants
C_SLACK = 64.0
KI_MAX_C = 10.0
T_EXCEPT = 5.0

# vanishing order cliff, relative to the summed term moduli
VANISH_RTOL = 1e-9

SCHEMA = "xizeros/1"
VERIFY_SCHEMA = "xizeros-verify/1"


def as_dict():
    """Return every default as a plain dict (sorted by name)."""
    return {name: value for name, value in sorted(globals().items())
            if name.isupper()}
