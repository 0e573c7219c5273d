"""
Central configuration file for cprank
"""

import os

from dotenv import load_dotenv

# Pick up a .env in the working directory before reading anything
load_dotenv()

# Enumeration limits
ENUM_CAP = int(os.getenv("CPRANK_ENUM_CAP", "16"))  # Largest n for enumerate_shapes and exact rank moments
LOGLOG_ENUM_CAP = int(os.getenv("CPRANK_LOGLOG_ENUM_CAP", "20"))  # Largest n for exact E{log2 log f} and E{H}

# Big-integer vs log-domain switch points
EXACT_RANK_MAX_HEIGHT = int(os.getenv("CPRANK_EXACT_RANK_MAX_HEIGHT", "24"))  # Taller shapes skip materializing f(t)
LOG_DOMAIN_PREC = int(os.getenv("CPRANK_LOG_DOMAIN_PREC", "96"))  # Mantissa bits for the log-domain rank recursion
MEAN_RANK_EXACT_MAX_N = int(os.getenv("CPRANK_MEAN_RANK_EXACT_MAX_N", "24"))  # pi_n * c_{n-1} materialized up to here

# Monte Carlo
MC_BLOCK_SIZE = int(os.getenv("CPRANK_MC_BLOCK_SIZE", "10000"))  # Samples per substream block
MC_WORKERS = int(os.getenv("CPRANK_MC_WORKERS", "1"))  # Threads drawing blocks (results never depend on it)
DEFAULT_SEED = int(os.getenv("CPRANK_DEFAULT_SEED", "0"))

# Numerics
THETA_TERM_CUTOFF = float(os.getenv("CPRANK_THETA_TERM_CUTOFF", "1e-17"))  # Stop a theta series below this term size

# Logging
LOG_LEVEL = os.getenv("CPRANK_LOG_LEVEL", "WARNING")
