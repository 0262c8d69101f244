"""Schedule reconstruction for time-triggered systems."""

from .context import (
    ContextEvent,
    ModeSpec,
    ModeTable,
    apply_events,
    apply_failure,
    apply_mode,
    apply_slack,
    load_context,
    load_mode_table,
)
from .errors import ReconstructionError
from .evaluator import Metrics, energy, evaluate, makespan, workload
from .models import (
    ApplicationModel,
    EndSystem,
    Link,
    MessageRecord,
    PlatformModel,
    Task,
    load_application,
    load_platform,
    route_lookup,
    serialize_application,
    serialize_platform,
    topological_order,
)
from .network import CollisionLists, allocate_message, transmission_duration
from .priorities import (
    LEAST_LOADED,
    SpatialPriorities,
    TemporalPriorities,
    b_level,
    builtin_temporal,
    ingest_priorities,
    least_loaded,
    temporal_order,
)
from .reconstructor import reconstruct_full, reconstruct_temporal, recover_failure
from .recovery import RecoveryLog, Snapshot, load_log, serialize_log, snapshot_restore
from .safety import Violation, safety_check
from .schedule import MessageEntry, Reservation, Schedule, TaskEntry, load_schedule, serialize_schedule
from .workload import chained_platform, generate_workload

__version__ = "0.1.0"
