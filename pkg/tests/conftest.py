import subprocess
import sys

import pytest


@pytest.fixture
def cli():
    """Run the CLI in a subprocess; returns the CompletedProcess."""

    def run(args, cwd):
        return subprocess.run(
            [sys.executable, "-m", "bathlink", *map(str, args)],
            capture_output=True,
            text=True,
            cwd=cwd,
        )

    return run
