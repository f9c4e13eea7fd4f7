"""Shared fixtures and path setup for the test suite."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from epigt.designs import TestMatrix, TestResults

# Keep pytest from collecting these imported dataclasses as test classes.
TestMatrix.__test__ = False
TestResults.__test__ = False
