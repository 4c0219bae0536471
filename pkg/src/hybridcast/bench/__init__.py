"""Benchmark harness: datasets, experiments and reports."""
from .datasets import BUILTIN, DATA_DIR_ENV, DatasetDescriptor, descriptor, load_dataset
from .experiment import (OUTPUT_DIR_ENV, ExperimentConfig, ResultTable, config_from_parser,
                         improvement_table, load_config, run_experiment)
from .report import emit_report, read_table_csv, svg_plot

__all__ = ["BUILTIN", "DATA_DIR_ENV", "DatasetDescriptor", "descriptor", "load_dataset",
           "OUTPUT_DIR_ENV", "ExperimentConfig", "ResultTable", "config_from_parser",
           "improvement_table", "load_config", "run_experiment", "emit_report",
           "read_table_csv", "svg_plot"]
