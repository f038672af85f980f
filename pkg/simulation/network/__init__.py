from simulation.network.topology import Network, estimate_q, generate_network, generate_topology, sample_gains
from simulation.network.spreading import SpreadingSet, generate_spreading
from simulation.network.scenario import Scenario, cellular_scenario, custom_scenario, generate_scenario
