"""Min-max condition number design of 2 x N unit-norm sensing matrices."""
from .core import (
    Design,
    SpectralSummary,
    SubsetIndex,
    kappa_from_cost,
    normalize_angle,
    pairwise_cost,
    spectral_closed_form,
    spectral_oracle,
)
from .designs import Family, TheoremOptimum, generate, theoretical_optimum
from .estimate import SimConfig, SimReport, simulate
from .search import BudgetExceeded, SearchResult, WorstCaseReport, grid_search, local_search, worst_case

__version__ = "0.1.0"
