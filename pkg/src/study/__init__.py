# Simulation Study Package
from .cases import CaseSpec, builtin_case
from .harness import StudyReport, aggregate_ci, report_table, run_case

__all__ = ["CaseSpec", "builtin_case", "StudyReport", "aggregate_ci", "report_table", "run_case"]
