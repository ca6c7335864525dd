"""Physical-layer-driven rate estimation and auto-adaptive XR streaming simulation.

The package computes the maximum achievable data rate of an NR downlink from
standards tables, maps estimates onto a streaming quality ladder with a
throttled switch controller, and replays full sessions through a
deterministic link simulator to quantify the QoS impact (switches, freezes,
framerate) of adapting versus not adapting.
"""

__version__ = "0.1.0"

from .channel import (
    ChannelScenario,
    McsTrace,
    MobilityTrace,
    PathLossModel,
    SnrToMcsMap,
    distance_at,
    estimate_at,
    mcs_from_snr,
    sample_mcs,
    snr_at,
    true_capacity,
)
from .controller import (
    DEFAULT_LADDER,
    ControllerState,
    Decision,
    QualityLadder,
    QualityProfile,
    select_profile,
    step,
    validate_ladder,
)
from .metrics import (
    ComparisonSummary,
    FreezeEvent,
    MetricsReport,
    compare_reports,
    compute_report,
    detect_freezes,
)
from .nr_rate import (
    CarrierConfig,
    RateEstimate,
    estimate_rate,
    format_mbps,
    max_data_rate,
    symbol_duration,
)
from .streaming import (
    RendererModel,
    SessionResult,
    SessionTimeline,
    StreamParams,
    apply_profile_switch,
    run_session,
)
from .tables import McsEntry, McsTableId, mcs_entries, mcs_lookup, prb_lookup
