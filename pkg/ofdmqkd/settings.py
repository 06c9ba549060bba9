#
# ***** OFDMQKD DEFAULT SETTINGS -- DO NOT MODIFY THIS FILE *****
#
# To override these settings use /etc/ofdmqkd.conf or the contents of the
# configuration file set by the environment variable OFDMQKD_CONF_FILE.
#
# Study parameters (protocol, modulator, channel, sweep, output) are not set
# here, they come from the YAML study config passed on the command line.

from typing import Any, Dict, List  # noqa

DEBUG = False

# Logging configuration
LOG_CONFIG_FILE = ''
LOG_HANDLERS = ['console']  # ['console', 'file']
LOG_FILE = 'ofdmqkd.log'  # NOTE: 'file' must be added to LOG_HANDLERS for logging to work
LOG_LEVEL = 'WARNING'  # DEBUG, INFO, WARNING, ERROR, CRITICAL
LOG_MAX_BYTES = 10 * 1024 * 1024  # 10 MB
LOG_BACKUP_COUNT = 2
LOG_FORMAT = 'default'  # 'default', 'simple', 'verbose', 'json' or any valid logging format

# Parallel sweeps
WORKERS = 4  # thread pool size for sweep grid points and Monte Carlo batches
ORACLE_BATCH_SIZE = 4096  # symbols per Monte Carlo batch

# Carrier count search
MAX_CARRIERS = 512  # upper end of the default optimal-N search grid

# Channel defaults
DEFAULT_ALPHA_DB_PER_KM = 0.2  # standard single mode fiber

# Outputs
OUTPUT_SCHEMA_VERSION = 1
