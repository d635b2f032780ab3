"""Network concentration indices: weight concentration measured along the links of a network."""
from .core import (
    BinaryGraph,
    DegreeSequence,
    IndexReport,
    InteractionMatrix,
    WeightVector,
    density,
    gini,
    hhi,
    is_graphical,
)
from .degree_solver import degree_benchmark, exact_max, greedy_max, nci_degree_constrained, rewire_refine
from .errors import NetConcError
from .indices import (
    LayerWeights,
    Transformation,
    index_report,
    nci_baseline,
    nci_density_adjusted,
    nci_multilayer,
    nci_null_model,
    nci_transformed,
    nci_weighted,
    psi_general,
)
from .netbuild import CoefficientMatrix, ReturnPanel, correlation_mst, mst, threshold_graph
from .netgen import ScenarioSpec, erdos_renyi, reference_weights, sample_simplex_uniform

__version__ = "0.1.0"
