import json
import os
from pathlib import Path

import yaml
from pydantic import ValidationError

from powergame.protocol import ExperimentSpec, GameConfig, NetworkConfig
from simulation import logger
from simulation.errors import ConfigurationError
from simulation.utils import exception_details

SPEC_PATH_ENV = "POWERGAME_SPEC_PATH"


class ExperimentConfig:
    """Experiment defaults overlaid with an optional spec file (JSON, or YAML by suffix).

    The file is named explicitly or through POWERGAME_SPEC_PATH.
    """

    def __init__(self, spec_path=None):
        self.config_cache = None
        self.spec_path = spec_path or os.getenv(SPEC_PATH_ENV)

        self.node_count = None
        self.area_side = None
        self.gain_mean_coefficient = None
        self.gain_exponent = None
        self.noise_power = None
        self.gain_model = None

        self.info_bits = None
        self.packet_bits = None
        self.rate = None
        self.max_power = None
        self.tolerance = None
        self.max_iterations = None

        self.receivers = None
        self.processing_gains = None
        self.modes = None
        self.repetitions = None
        self.weights = None
        self.output_dir = None
        self.formats = None
        self.plot = None
        self.master_seed = None
        self.workers = None

    def dump_values(self):
        attributes = {attr: getattr(self, attr) for attr in dir(self) if not attr.startswith('_') and not callable(getattr(self, attr))}
        return attributes

    def load_spec_file(self):
        if self.spec_path is None:
            return

        path = Path(self.spec_path)
        try:
            text = path.read_text()
            if path.suffix in (".yml", ".yaml"):
                self.config_cache = yaml.safe_load(text) or {}
            else:
                self.config_cache = json.loads(text)
            logger.success("Loaded experiment spec", spec_path=str(path))
        except (OSError, ValueError, yaml.YAMLError) as e:
            logger.error("Failed to load experiment spec", spec_path=str(path), error=exception_details(e))
            raise ConfigurationError(f"Cannot read experiment spec {path}: {e}")

    def get_config_value(self, key, default=None):
        if not self.config_cache or key not in self.config_cache:
            return default
        return self.config_cache[key]

    def get_config_composite_value(self, section, key, default=None):
        """`key` inside the nested `section` object, falling back to a flat top-level `key`."""
        nested = self.get_config_value(section, {}) or {}
        if key in nested:
            return nested[key]
        return self.get_config_value(key, default)

    def load_and_get_config_values(self):
        self.load_spec_file()

        self.node_count = self.get_config_composite_value('network', 'node_count', 100)
        self.area_side = self.get_config_composite_value('network', 'area_side', 500.0)
        self.gain_mean_coefficient = self.get_config_composite_value('network', 'gain_mean_coefficient', 0.3)
        self.gain_exponent = self.get_config_composite_value('network', 'gain_exponent', 2.0)
        self.noise_power = self.get_config_composite_value('network', 'noise_power', 5e-16)
        self.gain_model = self.get_config_composite_value('network', 'gain_model', 'amplitude')

        self.info_bits = self.get_config_composite_value('game', 'info_bits', 100)
        self.packet_bits = self.get_config_composite_value('game', 'packet_bits', 100)
        self.rate = self.get_config_composite_value('game', 'rate', 1e5)
        self.max_power = self.get_config_composite_value('game', 'max_power', 1.0)
        self.tolerance = self.get_config_composite_value('game', 'tolerance', 1e-10)
        self.max_iterations = self.get_config_composite_value('game', 'max_iterations', 10000)

        self.receivers = self.get_config_value('receivers', ['mf', 'de', 'mmse'])
        self.processing_gains = self.get_config_value('processing_gains', [50, 100, 200, 300])
        self.modes = self.get_config_value('modes', ['nc', 'so'])
        self.repetitions = self.get_config_value('repetitions', 10)
        self.weights = self.get_config_value('weights', None)
        self.output_dir = self.get_config_value('output_dir', 'results')
        self.formats = self.get_config_value('formats', ['csv', 'json'])
        self.plot = self.get_config_value('plot', True)
        self.master_seed = self.get_config_value('master_seed', 0)
        self.workers = self.get_config_value('workers', 1)

        return self

    def apply_overrides(self, **overrides):
        """Command-line values win over file values; None means not given."""
        for key, value in overrides.items():
            if value is None:
                continue
            if not hasattr(self, key):
                raise ConfigurationError(f"Unknown experiment setting: {key}")
            setattr(self, key, value)
        return self

    def to_spec(self) -> ExperimentSpec:
        try:
            return ExperimentSpec(
                network=NetworkConfig(
                    node_count=self.node_count,
                    area_side=self.area_side,
                    gain_mean_coefficient=self.gain_mean_coefficient,
                    gain_exponent=self.gain_exponent,
                    noise_power=self.noise_power,
                    seed=self.master_seed,
                    gain_model=self.gain_model,
                ),
                game=GameConfig(
                    info_bits=self.info_bits,
                    packet_bits=self.packet_bits,
                    rate=self.rate,
                    max_power=self.max_power,
                    tolerance=self.tolerance,
                    max_iterations=self.max_iterations,
                ),
                receivers=self.receivers,
                processing_gains=self.processing_gains,
                modes=self.modes,
                repetitions=self.repetitions,
                weights=self.weights,
                output_dir=self.output_dir,
                formats=self.formats,
                plot=self.plot,
                master_seed=self.master_seed,
                workers=self.workers,
            )
        except ValidationError as e:
            logger.error("Invalid experiment spec", error=exception_details(e))
            raise ConfigurationError(str(e))
