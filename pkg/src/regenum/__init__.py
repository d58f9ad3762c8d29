"""Connected k-regular graph enumeration, distribution, and ASPL search."""

from .errors import (
    DegenerateOrderError,
    DisconnectedError,
    Graph6ParseError,
    InfeasibleSpecError,
    JobMismatchError,
    MissingDataError,
    OracleScaleError,
    OrderMismatchError,
    RegenumError,
    UnknownTaskError,
)
from .graphs import (
    MAX_VERTICES,
    DegreeSpec,
    Graph,
    all_pairs_distances,
    aspl,
    aspl_lower_bound,
    canonical_form,
    degree,
    diameter,
    is_connected,
    is_isomorphic,
)
from .codec import from_graph6, to_graph6
from .generate import (
    PartialGraph,
    TaskDescriptor,
    choose_split_level,
    count_oracle,
    count_prefixes,
    enumerate_graphs,
    enumerate_prefixes,
    enumerate_task,
)
from .filters import (
    FilterSpec,
    SearchResult,
    apply_filter,
    emit_task_histogram,
    empty_result,
    merge,
)
from .scheduling import (
    ResultRow,
    RunReport,
    TaskLedger,
    execute_task,
    load_checkpoint,
    run_local,
    run_master,
    run_mono,
    run_worker,
)

__version__ = "0.1.0"

__all__ = [
    "MAX_VERTICES",
    "DegreeSpec",
    "FilterSpec",
    "Graph",
    "PartialGraph",
    "ResultRow",
    "RunReport",
    "SearchResult",
    "TaskDescriptor",
    "TaskLedger",
    "all_pairs_distances",
    "apply_filter",
    "aspl",
    "aspl_lower_bound",
    "canonical_form",
    "choose_split_level",
    "count_oracle",
    "count_prefixes",
    "degree",
    "diameter",
    "emit_task_histogram",
    "empty_result",
    "enumerate_graphs",
    "enumerate_prefixes",
    "enumerate_task",
    "execute_task",
    "from_graph6",
    "is_connected",
    "is_isomorphic",
    "load_checkpoint",
    "merge",
    "run_local",
    "run_master",
    "run_mono",
    "run_worker",
    "to_graph6",
    "DegenerateOrderError",
    "DisconnectedError",
    "Graph6ParseError",
    "InfeasibleSpecError",
    "JobMismatchError",
    "MissingDataError",
    "OracleScaleError",
    "OrderMismatchError",
    "RegenumError",
    "UnknownTaskError",
    "__version__",
]
