# Landing recordings
DEFAULT_HORIZON = 100  # seconds; T+1 samples per channel
TIME_STEP_S = 1.0
N_CHANNELS = 6
CHANNEL_NAMES = ("mass", "kinetic_energy", "speed", "thrust", "brake", "drag")

# Synthetic generator defaults (SI units, see dataset.generator)
DEFAULT_MASS_RANGE_KG = (40_000.0, 80_000.0)
DEFAULT_V0_RANGE_MS = (60.0, 80.0)
DEFAULT_DRAG_COEF_RANGE = (2.0, 6.0)  # N s^2 / m^2
DEFAULT_BRAKE_COEF_RANGE = (300.0, 900.0)  # N s / m per unit lever angle
DEFAULT_REVERSE_COEF_RANGE = (2.0, 6.0)  # N s^2 / m^2 per unit throttle
DEFAULT_NOISE_STD = 0.05
DEFAULT_REGIME_CHANGE_TIME = 50

# Kernel / GP numerics
JITTER_FACTOR = 1e-8  # jitter = JITTER_FACTOR * tau^2 on every Gram diagonal
VARIANCE_CLAMP = 1e-10
LOG_PARAM_BOUNDS = (-20.0, 20.0)
MODEL_FORMAT_VERSION = 1

# Hyperparameter optimizer
DEFAULT_MAX_ITERS = 200
DEFAULT_RESTARTS = 3
DEFAULT_INIT_STEP = 0.5
DEFAULT_CONVERGENCE_TOL = 1e-6
MAX_STEP_HALVINGS = 30
RESTART_FACTOR_RANGE = (1.0 / 3.0, 3.0)
INIT_NOISE_RATIO = 0.1  # sigma^2 = ratio * tau^2 at initialization

# Baselines
CART_LEAF_MIN = 5
CART_TIE_RTOL = 1e-12  # split SSEs this close, relative to the node SSE, are ties
DEFAULT_N_TREES = 500

# Evaluation
HISTOGRAM_BINS = 100
DEFAULT_EVAL_START = 0
DEFAULT_EVAL_END = 40  # errors are reported on the first 40 seconds by default
DEFAULT_FOLDS = 10
DEFAULT_TEST_SIZE = 150
DEFAULT_BLOCKS = 10
