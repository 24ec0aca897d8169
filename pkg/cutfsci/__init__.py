from .api.simulation import run_scenario
