"""Run the acceptance suite and print one PASS/FAIL line per criterion.

Exit status is that of pytest: nonzero when any criterion fails.
"""
import sys
from pathlib import Path

import pytest

if __name__ == "__main__":
    tests = Path(__file__).resolve().parent.parent / "tests" / "test_acceptance.py"
    sys.exit(pytest.main([str(tests), "-q", "-p", "no:cacheprovider", *sys.argv[1:]]))
