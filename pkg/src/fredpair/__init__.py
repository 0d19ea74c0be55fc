"""Indices of Fredholm pairs, Riemann-Hilbert symbols and planar bordisms."""

__version__ = "0.1.0"

from .errors import (ArgumentError, CalibrationError, ConvergenceError, FredpairError,
                     GeometryError, InconsistencyError, NoTransitionError, RangeError,
                     SymbolNotInvertibleError, WindowError)
from .split_space import (FourierWindow, SplitSpace, flat_projector, sharp_projector,
                          symmetry, twist_cut)
from .subspace import (PairIndexResult, Subspace, complement, coordinate, graph, image,
                       intersect, kato_index, kernel, pair_index, span)
from .symbols import (LaurentSymbol, block_decompose, commutator_rank,
                      multiplication_matrix, winding_curve, winding_number)
from .rh_index import (IndexReport, almost_homomorphism_defect, kappa, kappa_via_subspace,
                       kappa_via_trace, lphi_operator, transition_automorphism)
from .bordism import (Correspondence, bordism_index, chain_index, compose,
                      compose_with_defect, graph_pair_index)
from .planar import (BoundaryCircle, Calibration, PlanarDomain, SurfaceSpec,
                     build_correspondence, calibrate_conventions, expand_on_circle,
                     formula_index, verify_surface_formula)
