import contextlib
import os

# subset of ofdmqkd.settings read by SweepSpec and write_result
STUDY_SETTINGS = {
    'MAX_CARRIERS': 512,
    'DEFAULT_ALPHA_DB_PER_KM': 0.2,
    'OUTPUT_SCHEMA_VERSION': 1
}


@contextlib.contextmanager
def mod_env(*remove, **update):
    """
    Temporarily set and unset environment variables, e.g. OFDMQKD_CONF_FILE
    or WORKERS, restoring the previous values on exit.
    """
    env = os.environ
    saved = {k: env[k] for k in set(update) | set(remove) if k in env}
    try:
        env.update(update)
        for k in remove:
            env.pop(k, None)
        yield
    finally:
        for k in set(update) | set(remove):
            env.pop(k, None)
        env.update(saved)


def write_study(directory, text, name='study.yaml'):
    """Write a study config into directory and return its path."""
    path = os.path.join(directory, name)
    with open(path, 'w') as f:
        f.write(text)
    return path
