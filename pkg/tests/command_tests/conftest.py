import json

import pytest

from app import CONFIG_ENV_VAR, create_app


@pytest.fixture
def app(monkeypatch):
    """Application built from the defaults only."""
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
    return create_app({'TESTING': True})


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture
def write_file(tmp_path):
    """Write text under tmp_path and return the path as a string."""
    def write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return write


@pytest.fixture
def write_config(write_file):
    def write(values):
        return write_file('config.json', json.dumps(values))
    return write
