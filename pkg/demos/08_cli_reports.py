"""
Config in, report out, same bytes every time.
=============================================

The command line front end reads a small key = value config, runs the
named command, and writes a JSON report whose bytes depend only on the
config (plus the package version), never on wall time or thread count.
Handy for committing reports next to the configs that made them.
"""

import json
import os
import subprocess
import sys
import tempfile

CONFIG = """\
# three points on the circle, quadratic kernel
command = solve
set = circle
n = 3
s = 2.0
seed = 42
restarts = 4
output = demo-report.json
"""

with tempfile.TemporaryDirectory() as tmp:
    cfg = os.path.join(tmp, "solve.cfg")
    with open(cfg, "w") as fh:
        fh.write(CONFIG)

    # same entry point as the installed `rieszpol` script
    out = subprocess.run(
        [sys.executable, "-m", "rieszpol.cli", "run", "--config", cfg],
        cwd=tmp, capture_output=True, text=True,
    )
    print("stdout:", out.stdout.strip())

    path = os.path.join(tmp, "demo-report.json")
    with open(path, "rb") as fh:
        first = fh.read()
    report = json.loads(first)
    print("value:", report["payload"]["value"], " (exact is 9/4)")
    print("config hash:", report["config_hash"])

    # run again: byte-identical report even though wall time differs
    subprocess.run(
        [sys.executable, "-m", "rieszpol.cli", "run", "--config", cfg],
        cwd=tmp, capture_output=True, text=True,
    )
    with open(path, "rb") as fh:
        second = fh.read()
    print("re-run byte-identical:", first == second)

    # flags are sugar for the same config (the output name is part of the
    # config echo, so keep it equal and write into a subdirectory)
    sub = os.path.join(tmp, "flags")
    os.mkdir(sub)
    out = subprocess.run(
        [sys.executable, "-m", "rieszpol.cli", "solve", "--set", "circle",
         "--n", "3", "--s", "2.0", "--seed", "42", "--restarts", "4",
         "--output", "demo-report.json"],
        cwd=sub, capture_output=True, text=True,
    )
    with open(os.path.join(sub, "demo-report.json"), "rb") as fh:
        print("flags produce the same report:", fh.read() == first)
