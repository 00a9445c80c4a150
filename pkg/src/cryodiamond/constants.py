"""CODATA 2018 physical constants (SI). Every module takes its constants from here."""

PLANCK = 6.62607015e-34  # J s, exact
SPEED_OF_LIGHT = 299792458.0  # m s^-1, exact
BOLTZMANN = 1.380649e-23  # J K^-1, exact
ELEMENTARY_CHARGE = 1.602176634e-19  # C, exact
STEFAN_BOLTZMANN = 5.67037441918e-8  # W m^-2 K^-4

HC = PLANCK * SPEED_OF_LIGHT

NM = 1e-9
UM = 1e-6


def as_dict():
    return {
        "h_J_s": PLANCK,
        "c_m_per_s": SPEED_OF_LIGHT,
        "k_B_J_per_K": BOLTZMANN,
        "e_C": ELEMENTARY_CHARGE,
        "sigma_B_W_per_m2K4": STEFAN_BOLTZMANN,
    }
