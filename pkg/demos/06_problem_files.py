"""
Problem files and the command line
==================================

Problems are plain ``key = value`` files.  The same commands are
available from Python through ``run_command`` and from the shell through
``python -m telescoper``.
"""

import subprocess
import sys

from telescoper import corpus_path, parse_problem, run_command

path = corpus_path("proper2.prob")
print(path.read_text())

spec = parse_problem(path)
for cmd in ["check", "existence", "telescope", "verify"]:
    report = run_command(cmd, spec)
    print(report.to_text())

out = subprocess.run([sys.executable, "-m", "telescoper", "telescope", "--json", str(path)],
                     capture_output=True, text=True)
print("exit code", out.returncode)
print(out.stdout)
