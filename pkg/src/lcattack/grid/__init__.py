from .mapping import NYISO_ZONES, ieee14_fixture, map_zone_loads, read_zone_snapshot
from .model import Branch, Bus, Generator, GridModel, Load, load_model, parse_cdf, save_model
from .network import kron_reduce, ybus
from .powerflow import PowerFlowSolution, power_flow

__all__ = [
    "NYISO_ZONES", "Branch", "Bus", "Generator", "GridModel", "Load", "PowerFlowSolution",
    "ieee14_fixture", "kron_reduce", "load_model", "map_zone_loads", "parse_cdf",
    "power_flow", "read_zone_snapshot", "save_model", "ybus",
]
