"""Unit conventions and physical constants.

All frequencies inside the library are angular, in rad/ps. The CLI and
every file format use ordinary frequencies nu = omega / (2 pi) in THz;
the conversion happens only at that boundary. Times are in ps, sound
speeds in km/s (identical to nm/ps, hence consistent with rad/ps on
nanometre length scales), temperatures in K.
"""

import numpy as np

TWO_PI = 2.0 * np.pi

# CODATA (2018 exact) values, SI
K_B = 1.380649e-23          # J/K
H_PLANCK = 6.62607015e-34   # J s
HBAR = H_PLANCK / TWO_PI    # J s
EV = 1.602176634e-19        # J

# 1 meV quantum expressed as an ordinary frequency, E = h nu
THZ_PER_MEV = 1e-3 * EV / H_PLANCK / 1e12

# hbar in meV ps, used by the amplitude calibration
HBAR_MEV_PS = HBAR / EV * 1e3 * 1e12


def omega_from_thz(nu_thz):
    """Ordinary frequency in THz -> angular frequency in rad/ps."""
    return TWO_PI * nu_thz


def thz_from_omega(omega):
    """Angular frequency in rad/ps -> ordinary frequency in THz."""
    return omega / TWO_PI
