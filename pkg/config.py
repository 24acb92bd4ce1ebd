"""
Configuration settings for the structured DMD identification toolkit
"""
import os
from pathlib import Path

# Load environment variables from .env file if it exists
try:
    from dotenv import load_dotenv
    env_path = Path(__file__).parent / ".env"
    if env_path.exists():
        load_dotenv(env_path)
except ImportError:
    # python-dotenv not installed, skip .env loading
    pass

# Directory settings
BASE_DIR = Path(__file__).parent
OUTPUT_DIR = Path(os.getenv("STRUCTDMD_OUTPUT_DIR", str(BASE_DIR / "output")))
EXPERIMENTS_DIR = BASE_DIR / "experiments"

# Output settings
CSV_PRECISION = 17  # significant digits, enough for a bit-exact float64 round trip
VERBOSE = os.getenv("STRUCTDMD_VERBOSE", "1").lower() not in ("0", "false", "no", "off")

# Truncation default for the regression SVD
DEFAULT_TAU_P = 1e-10

# Burgers' benchmark
BURGERS_DEFAULT_N0 = 10  # desk scale, lifted order 110
BURGERS_FULL_SCALE_N0 = 40  # lifted order 1640
BURGERS_NU = 0.01
BURGERS_LENGTH = 1.0

# Coupled van der Pol benchmark
VDP_MU = 0.5
VDP_A = 0.5
VDP_B = 0.2

# Largest dense matrix (in entries) we are willing to allocate for lifted systems
MAX_DENSE_ENTRIES = int(float(os.getenv("STRUCTDMD_MAX_DENSE_ENTRIES", "5e7")))

# Full-scale Burgers tests are opt-in
RUN_FULL_SCALE = os.getenv("STRUCTDMD_FULL_SCALE", "0") == "1"


def safe_print(*args, **kwargs):
    """Safely print messages, handling closed stdout and encoding errors"""
    try:
        print(*args, **kwargs)
    except UnicodeEncodeError:
        # Fallback to ASCII-safe version
        message = " ".join(str(a) for a in args)
        print(message.encode('ascii', errors='replace').decode('ascii'))
    except (IOError, OSError, ValueError):
        pass


def ensure_directories(output_dir=None):
    """Create the output directory if it doesn't exist"""
    path = Path(output_dir) if output_dir else OUTPUT_DIR
    path.mkdir(parents=True, exist_ok=True)
    return path
