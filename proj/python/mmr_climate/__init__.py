"""Closed-form climate policy solver with minimax-regret analysis.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports it and adds the default model ensemble.
"""

from ._core import *  # noqa: F401,F403
from ._core import ClimateModel

DISCOUNT_RATES = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07]


def default_ensemble():
    """The six climate models with their carbon-climate response (degC/GtC)."""
    return [
        ClimateModel("GFDL", 0.00157),
        ClimateModel("BCC", 0.00186),
        ClimateModel("FIO", 0.00194),
        ClimateModel("HAD", 0.002286),
        ClimateModel("IPSL", 0.00236),
        ClimateModel("MIROC", 0.00244),
    ]
