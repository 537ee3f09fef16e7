# torwave - Package
"""
Arithmetic random waves on the flat torus.

This package contains modules for:
- Lattice point enumeration and spectral statistics (lattice)
- Unit-speed analytic reference curves (curve)
- Random eigenfunction sampling and evaluation (wave, rng)
- Nodal intersection counting and stability diagnostics (zeros)
- Monte Carlo experiments and theory comparators (experiments)
- Report export and replay (export_utils)
- Named acceptance presets (presets)
"""

__version__ = "1.0.0"
__author__ = "torwave Team"
