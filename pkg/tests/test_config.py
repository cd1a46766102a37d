import logging

import pytest

from config import Config, DevelopmentConfig, ProductionConfig, TestingConfig, get_config
from utils.i18n import I18n, i18n, resolve_locale


@pytest.fixture
def restore_loggers():
    names = ('core', 'utils', 'qrel')
    saved = {name: (logging.getLogger(name).handlers[:], logging.getLogger(name).level,
                    logging.getLogger(name).propagate) for name in names}
    yield
    for name, (handlers, level, propagate) in saved.items():
        logger = logging.getLogger(name)
        for handler in logger.handlers:
            if handler not in handlers:
                handler.close()
        logger.handlers = handlers
        logger.setLevel(level)
        logger.propagate = propagate


class TestConfig:
    def test_environment_selects_config(self, monkeypatch):
        assert get_config() is TestingConfig
        monkeypatch.setenv('QREL_ENV', 'production')
        assert get_config() is ProductionConfig
        assert get_config('development') is DevelopmentConfig
        assert get_config('unknown') is Config

    def test_testing_overrides(self):
        assert TestingConfig.DEFAULT_SAMPLES == 60
        assert TestingConfig.MASA_GUARD == 8
        assert TestingConfig.validate_config() == []

    def test_validation_errors(self):
        class Broken(Config):
            SCALAR_MODE = 'symbolic'
            DEFAULT_SAMPLES = 0
            MASA_GUARD = 30
            LOG_LEVEL = 'LOUD'

        errors = Broken.validate_config()
        assert len(errors) == 4
        assert any('symbolic' in e for e in errors)

    def test_section_getters(self):
        assert TestingConfig.get_reflexivity_config() == {
            'samples': 60, 'seed': TestingConfig.DEFAULT_SEED, 'guard': 8,
            'max_amplification': TestingConfig.MAX_AMPLIFICATION
        }
        assert set(Config.get_torus_config()) == {'tolerance', 'max_iterations', 'seed'}
        assert Config.get_scalar_config()['mode'] in ('exact', 'float')

    def test_log_file(self, tmp_path, restore_loggers):
        class FileLogging(TestingConfig):
            LOG_FILE = str(tmp_path / 'qrel.log')

        assert FileLogging.validate_config() == []
        logger = FileLogging.configure_logging()
        assert logger.name == 'qrel'
        logging.getLogger('core.reflexivity').debug("sampled %d vectors", 12)
        for handler in logging.getLogger('core').handlers:
            handler.flush()
        text = (tmp_path / 'qrel.log').read_text(encoding='utf-8')
        assert 'core.reflexivity' in text
        assert 'sampled 12 vectors' in text

    def test_missing_log_directory(self, tmp_path):
        class Nowhere(Config):
            LOG_FILE = str(tmp_path / 'missing' / 'qrel.log')

        assert any('Log file directory' in e for e in Nowhere.validate_config())


class TestI18n:
    def test_available_locales(self):
        assert i18n.get_available_locales() == ['en', 'es', 'fr', 'zh']

    def test_resolve_locale(self, monkeypatch):
        monkeypatch.setenv('LANG', 'fr_FR.UTF-8')
        assert resolve_locale('auto') == 'fr'
        assert resolve_locale('zh') == 'zh'
        assert resolve_locale('xx') == 'en'
        monkeypatch.setenv('LANG', 'C')
        assert resolve_locale('auto', 'es') == 'es'

    def test_translate(self):
        local = I18n()
        local.set_locale('fr')
        assert local.t('values.true') == 'oui'
        assert local.t('cli.summary_title', verb='classify').endswith('classify')
        assert local.t('labels.no_such_label') == 'labels.no_such_label'
        assert local.lookup('labels.no_such_label') is None

    def test_unknown_locale_falls_back(self):
        local = I18n()
        local.set_locale('xx')
        assert local.current_locale == 'en'
        assert local.t('values.false') == 'no'
