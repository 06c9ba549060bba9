from typing import Any, Dict

from ofdmqkd.utils.config import Config
from ofdmqkd.utils.logging import Logger

config = Config()
logger = Logger()


class App:
    """Process-wide settings plus logging for one CLI invocation."""

    def __init__(self) -> None:
        self.config: Dict[str, Any] = {}

    @property
    def debug(self) -> bool:
        return bool(self.config.get('DEBUG', False))


def create_app(config_override: Dict[str, Any] = None) -> App:
    app = App()

    app.config.update(config.get_user_config(config_override))

    logger.setup_logging(app)

    return app
