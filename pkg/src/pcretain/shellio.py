"""Command-line shell: configuration, CSV ingestion, reports and charts.

The implementation is split across :mod:`config`, :mod:`csvio`, :mod:`svg`
and :mod:`cli`; this module collects the public surface in one place.
"""

from .cli import (
    DegenerateResult,
    build_parser,
    cmd_anova,
    cmd_compare,
    cmd_pareto,
    cmd_retain,
    cmd_simulate,
    main,
    read_anova,
    read_tukey,
    write_anova,
    write_tukey,
)
from .config import ConfigError, RunConfig, load_manifest, write_manifest
from .csvio import DataFileError, DatasetFile, ingest_csv, read_dataset, read_groups, write_groups, write_matrix
from .svg import emit_pareto_svg, pareto_svg

__all__ = [
    "ConfigError", "DataFileError", "DatasetFile", "DegenerateResult", "RunConfig",
    "build_parser", "cmd_anova", "cmd_compare", "cmd_pareto", "cmd_retain", "cmd_simulate",
    "emit_pareto_svg", "ingest_csv", "load_manifest", "main", "pareto_svg", "read_anova",
    "read_dataset", "read_groups", "read_tukey", "write_anova", "write_groups", "write_manifest",
    "write_matrix", "write_tukey",
]
