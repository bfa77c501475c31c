"""Simulation and analysis of retweet-graph growth and its Polya urn."""

__version__ = "0.1.0"

from .analysis import (
    EstimationError,
    FitResult,
    YuleModel,
    distribution_distance,
    fi_product_bound,
    fit_exponent,
    ks_test,
    loglog_slope,
    predicted_exponent,
    yule_pdf,
    yule_tail,
)
from .histogram import SizeHistogram, read_histogram, write_histogram
from .model import (
    Arrival,
    ArrivalEvent,
    ConfigurationError,
    InfeasibleArrivalError,
    MessageTree,
    ModelParams,
    RetweetGraph,
    component_sizes,
    lcc_fraction,
    advance,
    apply_event,
    new_graph,
    replay,
    run,
    step,
)
from .oracle import ExactDistribution, check_equivalence, enumerate_rg, enumerate_urn
from .sampling import FenwickTree, RandomStream, replication_seed
from .urn import UrnParams, UrnState, bin_fractions, map_graph_to_urn, simulate_urn, urn_init, urn_step
