"""Tests for settings loading and the validated models."""

import os
from unittest import mock

import pytest
from pydantic import ValidationError

from config_loader import get_settings, load_config
from errors import OrderCapExceeded
from schemas import CliConfig, EngineSettings, OrbitEntry, OrbitReport, is_prime
from services.free_loops import fp_cayley


class TestLoadConfig:

    def test_defaults(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            settings = EngineSettings(**load_config())
        assert settings.order_cap == 10_000
        assert settings.max_prime == 7
        assert settings.exhaustive_limit == 100
        assert settings.debug is False

    def test_environment_overrides(self):
        env = {
            'AUTOLOOPS_ORDER_CAP': '500',
            'AUTOLOOPS_WORKERS': '4',
            'AUTOLOOPS_DEBUG': 'true',
            'AUTOLOOPS_LOG_LEVEL': 'debug',
        }
        with mock.patch.dict(os.environ, env):
            config = load_config()
        assert config['order_cap'] == 500
        assert config['workers'] == 4
        assert config['debug'] is True
        assert config['log_level'] == 'DEBUG'

    def test_invalid_integer_is_ignored(self):
        with mock.patch.dict(os.environ, {'AUTOLOOPS_ORDER_CAP': 'lots'}):
            assert load_config()['order_cap'] == 10_000

    def test_settings_are_cached(self):
        assert get_settings() is get_settings()

    def test_order_cap_from_environment(self):
        with mock.patch.dict(os.environ, {'AUTOLOOPS_ORDER_CAP': '100'}):
            get_settings.cache_clear()
            with pytest.raises(OrderCapExceeded, match="order cap exceeded"):
                fp_cayley(3)

    def test_prime_ceiling(self):
        with pytest.raises(ValidationError):
            EngineSettings(max_prime=17)


class TestCliConfig:

    def test_not_prime(self):
        with pytest.raises(ValidationError, match="4 is not prime"):
            CliConfig(command='classify', p=4)

    def test_classify_needs_p(self):
        with pytest.raises(ValidationError, match="requires --p"):
            CliConfig(command='orbits')

    def test_p_above_cap(self):
        with pytest.raises(ValidationError, match="exceeds the configured cap"):
            CliConfig(command='classify', p=11, max_prime=7)

    def test_verify_needs_input(self):
        with pytest.raises(ValidationError, match="--table or --element"):
            CliConfig(command='verify')

    def test_iso_needs_both_tables(self):
        with pytest.raises(ValidationError, match="--a and --b"):
            CliConfig(command='iso', a='a.txt')

    def test_unknown_check(self):
        with pytest.raises(ValidationError):
            CliConfig(command='verify', table='t.txt', checks=['loop', 'speed'])

    def test_valid(self):
        config = CliConfig(command='export', p=3, which='Q2', out='q2.txt')
        assert config.checks == ['loop', 'comm', 'auto', 'pa']

    @pytest.mark.parametrize("n, expected", [(0, False), (1, False), (2, True), (9, False), (13, True)])
    def test_is_prime(self, n, expected):
        assert is_prime(n) is expected


class TestOrbitReport:

    def test_sizes_must_partition(self):
        orbit = OrbitEntry(label='O1', size=3, representative='000', members=['000', '001', '002'])
        with pytest.raises(ValidationError, match="do not sum"):
            OrbitReport(p=2, total_subspaces=15, orbits=[orbit])
