from .app import create_app
from .config import ServiceConfig, load_config

__all__ = ["ServiceConfig", "create_app", "load_config"]
