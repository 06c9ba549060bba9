import os
from typing import Any, Dict

from flask import Config as FlaskConfig


class Config:

    @staticmethod
    def get_user_config(config_override: Dict[str, Any] = None) -> FlaskConfig:
        config = FlaskConfig('/')

        config.from_object('ofdmqkd.settings')
        config.from_pyfile('/etc/ofdmqkd.conf', silent=True)
        config.from_envvar('OFDMQKD_CONF_FILE', silent=True)
        config.update(config_override or {})

        config['DEBUG'] = get_config('DEBUG', default=False, type=bool, config=config)

        config['LOG_CONFIG_FILE'] = get_config('LOG_CONFIG_FILE', default='', type=str, config=config)
        config['LOG_HANDLERS'] = get_config('LOG_HANDLERS', default=['console'], type=list, config=config)
        config['LOG_FILE'] = get_config('LOG_FILE', default='ofdmqkd.log', type=str, config=config)
        config['LOG_LEVEL'] = get_config('LOG_LEVEL', default='WARNING', type=str, config=config)
        config['LOG_FORMAT'] = get_config('LOG_FORMAT', default='default', type=str, config=config)
        config['LOG_MAX_BYTES'] = get_config('LOG_MAX_BYTES', default=10 * 1024 * 1024, type=int, config=config)
        config['LOG_BACKUP_COUNT'] = get_config('LOG_BACKUP_COUNT', default=2, type=int, config=config)

        config['WORKERS'] = get_config('WORKERS', default=4, type=int, config=config)
        config['ORACLE_BATCH_SIZE'] = get_config('ORACLE_BATCH_SIZE', default=4096, type=int, config=config)
        config['MAX_CARRIERS'] = get_config('MAX_CARRIERS', default=512, type=int, config=config)
        config['DEFAULT_ALPHA_DB_PER_KM'] = get_config('DEFAULT_ALPHA_DB_PER_KM', default=0.2, type=float,
                                                       config=config)
        config['OUTPUT_SCHEMA_VERSION'] = get_config('OUTPUT_SCHEMA_VERSION', default=1, type=int, config=config)

        # Runtime config check
        if config['WORKERS'] < 1:
            raise RuntimeError(f"WORKERS must be at least 1, not {config['WORKERS']}")

        if config['ORACLE_BATCH_SIZE'] < 1:
            raise RuntimeError(f"ORACLE_BATCH_SIZE must be at least 1, not {config['ORACLE_BATCH_SIZE']}")

        if config['MAX_CARRIERS'] < 1:
            raise RuntimeError(f"MAX_CARRIERS must be at least 1, not {config['MAX_CARRIERS']}")

        if config['DEFAULT_ALPHA_DB_PER_KM'] < 0:
            raise RuntimeError('DEFAULT_ALPHA_DB_PER_KM must not be negative')

        return config


def get_config(key, default=None, type=None, **kwargs):

    if key in os.environ:
        rv = os.environ[key]
        if type == bool:
            return rv.lower() in ['yes', 'on', 'true', 't', '1']
        elif type == list:
            return rv.split(',')
        elif type is not None:
            try:
                rv = type(rv)
            except ValueError:
                rv = default
        return rv

    try:
        rv = kwargs['config'].get(key, default)
    except KeyError:
        rv = default
    return rv
