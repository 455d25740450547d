"""Load-changing attack feasibility toolkit.

Demand analytics (DMD, load/temperature screening), target preselection,
multi-machine swing simulation of load events, and frequency-standard checks.
"""

__version__ = "0.1.0"
