import pytest

from modules import set_debug_logging_enabled, set_log_dir


@pytest.fixture(autouse=True, scope="session")
def isolated_logs(tmp_path_factory):
    """Keep error_log.txt and the debug log out of the repo root."""
    log_dir = tmp_path_factory.mktemp("logs")
    set_log_dir(str(log_dir))
    set_debug_logging_enabled(False)
    yield log_dir
    set_debug_logging_enabled(False)
    set_log_dir(None)


@pytest.fixture
def log_dir(tmp_path, isolated_logs):
    """Per-test log directory for tests that read the log files back."""
    path = tmp_path / "logs"
    set_log_dir(str(path))
    yield path
    set_debug_logging_enabled(False)
    set_log_dir(str(isolated_logs))
