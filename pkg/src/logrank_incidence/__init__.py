"""Exact point-hyperplane incidence tools for the log-rank problem: rational
linear algebra, flats, biclique and rectangle search, listability reductions,
protocol trees and explicit constructions."""
from .configurations import Configuration, ParallelPartition, Rectangle, con_of, mat_of
from .geometry import Flat, Hyperplane
from .linalg import RationalMatrix, factorize, rank
from .search import Biclique, max_monochromatic_rectangle, rs_exact

__all__ = [
    "Biclique", "Configuration", "Flat", "Hyperplane", "ParallelPartition", "RationalMatrix",
    "Rectangle", "con_of", "factorize", "mat_of", "max_monochromatic_rectangle", "rank", "rs_exact",
]
