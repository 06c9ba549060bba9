from ofdmqkd.version import __version__  # noqa
