"""Run the acceptance suite and print only the per-criterion lines."""
import subprocess
import sys
from pathlib import Path

root = Path(__file__).resolve().parent.parent
proc = subprocess.run([sys.executable, "-m", "pytest", str(root / "tests" / "test_acceptance.py"), "-q", "-rN"],
                      capture_output=True, text=True, cwd=root)
lines = [ln for ln in proc.stdout.splitlines() if ln.startswith(("PASS criterion", "FAIL criterion"))]
print("\n".join(lines) if lines else proc.stdout)
sys.exit(proc.returncode)
