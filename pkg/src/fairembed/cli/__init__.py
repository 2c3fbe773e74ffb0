from .config import RunConfig, load_config, schema_help
from .main import main

__all__ = ["RunConfig", "load_config", "schema_help", "main"]
