"""walker-kit: certification toolkit for a family of four-dimensional
Einstein metrics with a parallel null distribution and their symmetry
reductions. Exact symbolic checks where closed forms allow, seeded
numeric probes elsewhere."""

__version__ = "0.1.0"
