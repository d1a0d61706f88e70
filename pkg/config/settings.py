import os
from dotenv import load_dotenv

load_dotenv()  # This loads variables from .env into the environment

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
OUTPUT_DIR = os.getenv("OUTPUT_DIR", "results")
MAX_WORKERS = int(os.getenv("MAX_WORKERS", "4"))

DEFAULT_D_MHZ = float(os.getenv("DEFAULT_D_MHZ", "1.0"))
DEFAULT_TAU_STEP_NS = float(os.getenv("DEFAULT_TAU_STEP_NS", "1.0"))
DEFAULT_THETA_STEP_DEG = float(os.getenv("DEFAULT_THETA_STEP_DEG", "1.0"))
DEFAULT_THETA_END_DEG = float(os.getenv("DEFAULT_THETA_END_DEG", "179.0"))

# Dense 2^N x 2^N storage; table1 refuses larger systems
MAX_SPINS = int(os.getenv("MAX_SPINS", "12"))

# Free-electron gyromagnetic ratio (GHz/T)
ELECTRON_GAMMA_GHZ_PER_T = 28.0

SCENARIO_CONFIG = {
    'uniform': {
        'n_spins': 3,
        'd_mhz': DEFAULT_D_MHZ,
        'tau_end_ns': 650.0
    },
    'triangle': {
        'd12_mhz': -1.0,
        'd13_mhz': 1.6,
        'd23_mhz': 1.6,
        'tau_end_ns': 1100.0
    },
    'chain': {
        'd12_mhz': -1.0,
        'd13_mhz': -2.0,
        'tau_end_ns': 2900.0
    },
    'custom': {
        'tau_end_ns': 650.0
    }
}

NUMERICS_CONFIG = {
    'hermitian_tol': 1e-12,
    'norm_tol': 1e-12,
    'imag_tol': 1e-8,
    'variance_clamp': 1e-12,
    'density_trace_tol': 1e-10,
    'density_eig_tol': 1e-10,
    'mean_theta_tol': 1e-10,
    # J below this fraction of its maximum (N/2, or 1/2 per site) is degenerate
    'degenerate_fraction': 1e-6,
    'theta_tie_tol': 1e-12,
    'dip_tol': 1e-4
}

ENTROPY_CONFIG = {
    'plateau_tol': 0.01
}
