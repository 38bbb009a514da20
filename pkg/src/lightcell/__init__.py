"""Timeslotted simulator for secure cell formation in indoor visible-light networks.

Submodules:
    channel         Lambertian LoS / first-reflection NLoS gains, blockage
    secrecy         artificial-noise precoding and the secrecy-rate bound
    effective_rate  effective secrecy rate under QoS exponents
    lyapunov        virtual queues and drift-plus-penalty weights
    pso             modified particle swarm minimizer, per-cell solver
    scheduler       interference graph, greedy independent-set scheduling
    sim             slot-by-slot engine, configs, sweeps, CSV output
    cli             command-line front end
"""

from .channel import (
    ChannelState,
    PhysParams,
    Scenario,
    capable_ap_set,
    concentrator_gain,
    gain_table,
    grid_ap_positions,
    lambertian_order,
    los_gain,
    nlos_gain,
    random_user_positions,
    sample_slot_channel,
)
from .effective_rate import (
    EsrAccumulator,
    QoSProfile,
    eb_from_bps,
    esr_expectation,
    esr_running,
    theta_from_bps,
)
from .lyapunov import (
    StabilityReport,
    VirtualQueueState,
    dpp_total,
    dpp_user_term,
    queue_update,
    stability_check,
)
from .pso import IntraCellSolution, PsoConfig, PsoResult, pso_minimize, solve_intra_cell
from .scheduler import (
    InterferenceGraph,
    PfState,
    Schedule,
    baseline_schedule,
    build_ig,
    epsilon_threshold,
    greedy_max_weight_is,
    greedy_min_weight_is,
    mr_rate,
    mr_weights,
    pf_priority_update,
)
from .secrecy import (
    SecureCellParams,
    achievable_secrecy_rate,
    min_rate_batch,
    mrt_vector,
    nullspace_basis,
    pairwise_secrecy_rate_lb,
    rate_to_bits_per_second,
)
from .sim import (
    ALGORITHMS,
    ConfigError,
    RunResult,
    RunSummary,
    SlotRecord,
    SweepRow,
    apply_axis,
    build_scenario,
    epsilon_from,
    pso_config_from,
    reference_config,
    run,
    sweep,
    write_run_summary_csv,
    write_slots_csv,
    write_sweep_summary_csv,
)

__version__ = "0.1.0"
