"""
Settings utility module.
This module loads environment configuration and configures logging.
"""
import logging
import os

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

LOG_LEVEL = os.getenv("SUBLEVEL_LOG_LEVEL", "INFO")
OUTPUT_DIR = os.getenv("SUBLEVEL_OUTPUT_DIR", "reports")
SAFETY_FACTOR = float(os.getenv("SUBLEVEL_SAFETY_FACTOR", "0.9"))
DEFAULT_SEED = int(os.getenv("SUBLEVEL_SEED", "0"))
RESOLUTION_2D = int(os.getenv("SUBLEVEL_RESOLUTION_2D", "512"))
RESOLUTION_3D = int(os.getenv("SUBLEVEL_RESOLUTION_3D", "128"))

def default_resolution(dim: int) -> int:
    """
    Get the default level-set grid resolution for a dimension.

    Args:
        dim (int): The ambient dimension of the domain.

    Returns:
        int: Cells per axis.
    """
    if dim <= 2:
        return RESOLUTION_2D
    return RESOLUTION_3D

def configure_logging(level: str = LOG_LEVEL) -> None:
    """
    Configure the root logger once for CLI and HTTP runs.

    Args:
        level (str): The logging level name.
    """
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
