"""
Lab configuration - config.json with defaults, env override for the seed
"""
import os
import json

from .logger import log_error, log_debug, get_base_dir

SEED_ENV_VAR = 'MAJORITY_LAB_SEED'
CONFIG_FILE_NAME = 'config.json'


class ConfigError(ValueError):
    """Invalid configuration value."""


class LabConfig:
    """Settings shared by the CLI and the experiment harness."""

    DEFAULTS = {
        'default_seed': 42,
        'trials': 10000,
        'epsilon': 0.05,
        'budget_d': 3.0,
        'tail_r': [1.0, 2.0, 4.0],
        'workers': 4,
        'executor': 'auto',
        'max_n': 1 << 20,
        'debug_logging': False,
    }

    def __init__(self, config_file=None):
        self.config_file = config_file or os.path.join(get_base_dir(), CONFIG_FILE_NAME)
        self.default_seed = self.DEFAULTS['default_seed']
        self.trials = self.DEFAULTS['trials']
        self.epsilon = self.DEFAULTS['epsilon']
        self.budget_d = self.DEFAULTS['budget_d']
        self.tail_r = list(self.DEFAULTS['tail_r'])
        self.workers = self.DEFAULTS['workers']
        self.executor = self.DEFAULTS['executor']
        self.max_n = self.DEFAULTS['max_n']
        self.debug_logging = self.DEFAULTS['debug_logging']

    @classmethod
    def load(cls, config_file=None, environ=None):
        config = cls(config_file)
        config.load_config()
        config.apply_environment(os.environ if environ is None else environ)
        return config

    def load_config(self):
        """Load configuration from file - thiếu file là bình thường"""
        if not os.path.exists(self.config_file):
            return

        try:
            with open(self.config_file, 'r', encoding='utf-8', errors='replace') as f:
                config = json.load(f)
            if not isinstance(config, dict):
                raise ValueError("config root must be an object")

            self.default_seed = config.get('default_seed', self.default_seed)
            self.trials = config.get('trials', self.trials)
            self.epsilon = config.get('epsilon', self.epsilon)
            self.budget_d = config.get('budget_d', self.budget_d)
            self.tail_r = config.get('tail_r', self.tail_r)
            self.workers = config.get('workers', self.workers)
            self.executor = config.get('executor', self.executor)
            self.max_n = config.get('max_n', self.max_n)
            self.debug_logging = config.get('debug_logging', self.debug_logging)
            self._sanitize()
        except (FileNotFoundError, IOError, PermissionError) as e:
            log_error("Lỗi đọc file cấu hình", e)
        except (json.JSONDecodeError, ValueError) as e:
            log_error("Lỗi parse JSON cấu hình (file có thể bị hỏng)", e)
            self._reset_defaults()

    def apply_environment(self, environ):
        raw = environ.get(SEED_ENV_VAR)
        if raw is None or raw == '':
            return
        try:
            self.default_seed = parse_seed(raw)
            log_debug(f"Seed from {SEED_ENV_VAR}: {self.default_seed}")
        except ConfigError as e:
            log_error(f"Ignoring {SEED_ENV_VAR}={raw!r}", e)

    def _reset_defaults(self):
        fresh = LabConfig(self.config_file)
        self.__dict__.update(fresh.__dict__)

    def _sanitize(self):
        # Giá trị sai kiểu -> về mặc định, giá trị ngoài khoảng -> clamp
        if not isinstance(self.default_seed, int) or self.default_seed < 0:
            self.default_seed = self.DEFAULTS['default_seed']
        self.default_seed &= (1 << 64) - 1
        if not isinstance(self.trials, int) or self.trials < 1:
            self.trials = self.DEFAULTS['trials']
        if not isinstance(self.epsilon, (int, float)) or not 0 < self.epsilon < 1:
            self.epsilon = self.DEFAULTS['epsilon']
        if not isinstance(self.budget_d, (int, float)) or self.budget_d <= 0:
            self.budget_d = self.DEFAULTS['budget_d']
        if (not isinstance(self.tail_r, list)
                or not all(isinstance(r, (int, float)) and r >= 1 for r in self.tail_r)):
            self.tail_r = list(self.DEFAULTS['tail_r'])
        if not isinstance(self.workers, int) or self.workers < 1:
            self.workers = self.DEFAULTS['workers']
        self.workers = min(self.workers, 64)
        if self.executor not in ('auto', 'thread', 'process'):
            self.executor = self.DEFAULTS['executor']
        if not isinstance(self.max_n, int) or self.max_n < 1:
            self.max_n = self.DEFAULTS['max_n']
        self.debug_logging = bool(self.debug_logging)

    def to_dict(self):
        return {
            'default_seed': self.default_seed,
            'trials': self.trials,
            'epsilon': self.epsilon,
            'budget_d': self.budget_d,
            'tail_r': list(self.tail_r),
            'workers': self.workers,
            'executor': self.executor,
            'max_n': self.max_n,
            'debug_logging': self.debug_logging,
        }

    def save_config(self):
        """Lưu cấu hình vào file"""
        config_dir = os.path.dirname(self.config_file)
        if config_dir and not os.path.exists(config_dir):
            try:
                os.makedirs(config_dir, exist_ok=True)
            except Exception as e:
                log_error(f"Error creating config directory: {config_dir}", e)
        try:
            with open(self.config_file, 'w', encoding='utf-8') as f:
                json.dump(self.to_dict(), f, indent=2, ensure_ascii=False)
                f.write("\n")
                f.flush()
        except (IOError, PermissionError, OSError) as file_err:
            log_error("Lỗi ghi file cấu hình", file_err)
            raise


def parse_seed(raw):
    """Accept decimal or 0x-prefixed seeds; reduce to 64 bits."""
    try:
        value = int(str(raw).strip(), 0)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"seed must be an integer, got {raw!r}") from e
    if value < 0:
        raise ConfigError(f"seed must be non-negative, got {value}")
    return value & ((1 << 64) - 1)
