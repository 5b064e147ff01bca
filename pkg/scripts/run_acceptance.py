"""Run the acceptance criteria and print one line per criterion."""

import subprocess
import sys
from pathlib import Path

root = Path(__file__).resolve().parents[1]
sys.exit(subprocess.call([sys.executable, "-m", "pytest", "-q", "-s", str(root / "tests" / "test_acceptance.py")]))
