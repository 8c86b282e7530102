"""dB-scale unit conversions, centralized so every module agrees on them."""

import numpy as np


def db_to_linear(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def dbw_to_watt(x):
    """dBW -> W (0 dBW = 1 W)."""
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def dbm_to_watt(x):
    """dBm -> W (30 dBm = 1 W)."""
    return 10.0 ** ((np.asarray(x, dtype=float) - 30.0) / 10.0)


def watt_to_dbm(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float)) + 30.0
