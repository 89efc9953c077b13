"""cadre: resampled causal discovery and forecast calibration.

Greedy equivalence search with penalized BIC, run over bootstrap or
delete-d jackknife replicates, aggregated into ensemble graphs and
per-edge forecasts, and evaluated against known generating models with
Brier score, bias-corrected reliability, calibration curves, and
structural accuracy metrics.
"""

__version__ = "0.1.0"

from .graphs import (  # noqa: F401
    Cpdag,
    Dag,
    PairRelation,
    Pdag,
    complete_pdag,
    confusion_counts,
    dag_to_cpdag,
    relation_of,
    shd,
)
from .datasets import Dataset  # noqa: F401
from .sem import LinearSem, RandomDagSpec, SplitUniform, random_forward_dag  # noqa: F401
from .bn import DiscreteBn, parse_bif, sample_bn  # noqa: F401
from .scoring import ScoreConfig  # noqa: F401
from .ges import run_ges  # noqa: F401
from .resampling import ResamplePlan, bootstrap_indices, jackknife_indices  # noqa: F401
from .ensemble import ensemble_graph, forecast_table, tally_votes  # noqa: F401
from .evaluation import (  # noqa: F401
    brier_score,
    calibration_curve,
    murphy_decomposition,
    outcomes_from_truth,
)
from .campaign import CampaignConfig, emit_plot_data, run_campaign  # noqa: F401
