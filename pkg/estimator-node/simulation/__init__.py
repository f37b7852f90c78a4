from simulation.config import ConfigInvalid, SimulationConfig, load_config
from simulation.summary import CellStats, EmptyInput, SimulationSummary, cell_stats, quantile
from simulation.harness import TooManyFailures, run_replication, run_simulation
from simulation.report import digest, read_table, summary_json, write_summary
