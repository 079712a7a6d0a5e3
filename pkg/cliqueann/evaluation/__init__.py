from .benchmark import BENCH_COLUMNS, bench, compare_strategies, params_grid, write_csv
from .concentration import ConcentrationResult, concentration_probe
from .metrics import mean_recall, recall_at_k
from .workloads import (
    RANGE_PRESET_TARGETS,
    Workload,
    gen_fixed_label_workload,
    gen_range_workload,
    gen_zipf_label_workload,
    regenerate,
)

__all__ = [
    "BENCH_COLUMNS",
    "bench",
    "compare_strategies",
    "params_grid",
    "write_csv",
    "ConcentrationResult",
    "concentration_probe",
    "recall_at_k",
    "mean_recall",
    "RANGE_PRESET_TARGETS",
    "Workload",
    "gen_zipf_label_workload",
    "gen_range_workload",
    "gen_fixed_label_workload",
    "regenerate",
]
