"""Physical constants (CODATA 2018, SI units)."""

HBAR = 1.054571817e-34     # J s
KB = 1.380649e-23          # J/K (exact)
MU0 = 1.25663706212e-6     # N/A^2
C0 = 299792458.0           # m/s (exact)
