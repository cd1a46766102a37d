"""
Configuration settings for the Quantum Relations Toolkit
"""

import logging
import os


class Config:
    """Base configuration class"""

    # Scalar settings
    SCALAR_MODE = os.environ.get('QREL_SCALAR_MODE', 'exact')
    FLOAT_TOLERANCE = float(os.environ.get('QREL_TOLERANCE', '1e-9'))

    # Reflexivity sampler settings
    DEFAULT_SEED = int(os.environ.get('QREL_SEED', '0'))
    DEFAULT_SAMPLES = int(os.environ.get('QREL_SAMPLES', '200'))
    MASA_GUARD = int(os.environ.get('QREL_MASA_GUARD', '12'))
    MAX_AMPLIFICATION = int(os.environ.get('QREL_MAX_AMPLIFICATION', '3'))

    # Quantum torus settings
    TORUS_TOLERANCE = float(os.environ.get('QREL_TORUS_TOLERANCE', '1e-9'))
    POWER_ITERATION_MAX = int(os.environ.get('QREL_POWER_ITERATIONS', '10000'))

    # Output settings
    DEFAULT_LOCALE = os.environ.get('QREL_LOCALE', 'en')

    # Logging settings
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')
    LOG_FILE = os.environ.get('LOG_FILE')
    LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'

    @classmethod
    def validate_config(cls):
        """Validate configuration settings"""
        errors = []

        if cls.SCALAR_MODE not in ('exact', 'float'):
            errors.append(f"QREL_SCALAR_MODE must be 'exact' or 'float', got {cls.SCALAR_MODE!r}")

        if cls.FLOAT_TOLERANCE < 0:
            errors.append(f"Float tolerance must be nonnegative, got {cls.FLOAT_TOLERANCE}")

        if cls.TORUS_TOLERANCE <= 0:
            errors.append(f"Torus tolerance must be positive, got {cls.TORUS_TOLERANCE}")

        if cls.DEFAULT_SAMPLES < 1:
            errors.append("At least one reflexivity sample is required")

        # Subset sweeps over 2^n diagonal projections
        if cls.MASA_GUARD > 20:
            errors.append(f"Masa guard {cls.MASA_GUARD} exceeds the recommended limit of 20")

        if cls.MAX_AMPLIFICATION < 1:
            errors.append("Maximum amplification must be at least 1")

        if cls.POWER_ITERATION_MAX < 1:
            errors.append("Power iteration needs at least one step")

        if cls.LOG_LEVEL.upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            errors.append(f"Unknown log level: {cls.LOG_LEVEL}")

        if cls.LOG_FILE and not os.path.isdir(os.path.dirname(os.path.abspath(cls.LOG_FILE))):
            errors.append(f"Log file directory does not exist: {cls.LOG_FILE}")

        return errors

    @classmethod
    def configure_logging(cls, level=None):
        """Attach a handler to the library loggers"""
        handler = logging.FileHandler(cls.LOG_FILE) if cls.LOG_FILE else logging.StreamHandler()
        handler.setFormatter(logging.Formatter(cls.LOG_FORMAT))
        level = (level or cls.LOG_LEVEL).upper()
        for name in ('core', 'utils', 'qrel'):
            logger = logging.getLogger(name)
            logger.handlers = [handler]
            logger.setLevel(level)
            logger.propagate = False
        return logging.getLogger('qrel')

    @classmethod
    def get_scalar_config(cls):
        """Get scalar field configuration"""
        return {
            'mode': cls.SCALAR_MODE,
            'tolerance': cls.FLOAT_TOLERANCE
        }

    @classmethod
    def get_reflexivity_config(cls):
        """Get reflexivity sampler configuration"""
        return {
            'samples': cls.DEFAULT_SAMPLES,
            'seed': cls.DEFAULT_SEED,
            'guard': cls.MASA_GUARD,
            'max_amplification': cls.MAX_AMPLIFICATION
        }

    @classmethod
    def get_torus_config(cls):
        """Get quantum torus configuration"""
        return {
            'tolerance': cls.TORUS_TOLERANCE,
            'max_iterations': cls.POWER_ITERATION_MAX,
            'seed': cls.DEFAULT_SEED
        }


class DevelopmentConfig(Config):
    """Development configuration"""
    LOG_LEVEL = 'DEBUG'


class ProductionConfig(Config):
    """Production configuration"""
    LOG_LEVEL = 'WARNING'


class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    LOG_LEVEL = 'DEBUG'

    # Smaller sweeps for the test suite
    DEFAULT_SAMPLES = 60
    MASA_GUARD = 8


# Configuration mapping
config_map = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': Config
}


def get_config(config_name=None):
    """Get configuration class based on environment"""
    if config_name is None:
        config_name = os.environ.get('QREL_ENV', 'default')

    return config_map.get(config_name, Config)
