"""Fixtures for command-line tests"""

import pytest

from cli.cli import main

#: Detection flags cheap enough for unit tests
FAST_FLAGS = ['--mlesac-iters', '15', '--refine-steps', '0', '--stride', '5']


@pytest.fixture
def run(capsys):
    """Invoke the CLI in-process and return (exit code, captured stdout)"""
    def _run(*argv):
        code = main([str(arg) for arg in argv])
        return code, capsys.readouterr().out
    return _run


@pytest.fixture
def microwave_csv(tmp_path, run):
    """Synthetic latched-door trajectory written through the CLI"""
    path = tmp_path / 'microwave.csv'
    code, _ = run('synth', '--object', 'microwave', '--T', 40, '--gamma', 0.0, '--sigma-trans', 0.002,
                  '--sigma-rot', 0.005, '--seed', 11, '-o', path)
    assert code == 0
    return path
