"""Storage/transmission rate and distortion region of incremental (sequential
massive random access) coding for Gaussian sources with memory.

Typical use::

    from smra_rd import paper_example_network, sweep_curve

    net = paper_example_network("nearest_neighbor", n=1000)
    curve = sweep_curve(net)            # classical policy, default theta grid
    curve.storage(), curve.rates("3")
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DimensionMismatch,
    InvalidParameter,
    InvalidSampleCount,
    NotPositiveDefinite,
    QuadratureFailure,
    SingularSystem,
    SMRAError,
    TargetUnreachable,
    UnknownPredecessor,
    Unsupported,
)
from .covariance import (
    CorrelationModel,
    CustomToeplitz,
    FirstOrderMarkov,
    Memoryless,
    NearestNeighbor,
    Predecessor,
    SourceNetwork,
    ToeplitzMatrix,
    build_covariance,
    paper_example_network,
)
from .spectrum import (
    Spectrum,
    density_range,
    eigenvalues,
    rate_function,
    spectral_density,
    szego_average,
    tridiagonal_closed_form,
)
from .theorem import (
    CLASSICAL,
    OperatingPoint,
    RDCurve,
    RDTuple,
    distortion,
    evaluate_tuple,
    network_spectra,
    solve_theta,
    storage_rate,
    sweep_curve,
    transmission_rate,
)
from .channel_sim import (
    SimResult,
    TestChannel,
    analytic_distortion,
    analytic_rate,
    build_estimator,
    expected_distortion,
    simulate,
)
from .layout import BitstreamLayout, ComponentLayout, build_layout, extract_rate, verify_against_theorem
