"""Spectral sets of the random hopping operator with a +-1 subdiagonal.

Finite-section eigenvalue unions (``sigma_n``), periodic-operator spectra
(``pi_n``), pseudospectral grids, and the Sierpinski-type eigenvector
construction for points of the unit disk.
"""

__version__ = "0.1.0"

from .core import ComplexGrid, SpectralPointCloud, dedup, hausdorff_distance, one_sided_distance
from .finite_spectra import CapExceeded, PatternId, sigma_n, sigma_n_eps
from .periodic_spectra import pi_n
from .pseudospectra import eps_n, numerical_range_boundary, resolvent_norm_grid
from .sierpinski import coefficient_table, eigenvector, sierpinski_sign

__all__ = [
    "ComplexGrid",
    "SpectralPointCloud",
    "dedup",
    "hausdorff_distance",
    "one_sided_distance",
    "CapExceeded",
    "PatternId",
    "sigma_n",
    "sigma_n_eps",
    "pi_n",
    "eps_n",
    "numerical_range_boundary",
    "resolvent_norm_grid",
    "coefficient_table",
    "eigenvector",
    "sierpinski_sign",
]
