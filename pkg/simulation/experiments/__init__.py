from simulation.experiments.runner import build_scenario, run_cell, run_experiment
from simulation.experiments.summary import Summary, TableCell, render_text, summarize
from simulation.experiments.emit import emit, load_csv, load_json, write_csv, write_json, write_plot_data
