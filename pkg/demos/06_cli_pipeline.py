"""The whole experiment through the command line, on a reduced config.

Equivalent shell session:

    airtaxi --config demo.yaml all -v
"""
import tempfile
from pathlib import Path

import yaml

from airtaxi.cli import main

out = Path(tempfile.mkdtemp()) / "run"
cfg = {
    "output": str(out),
    "seed": 11,
    "k_values": [5, 10],
    "cv_folds": 5,
    "grids": {"rf": {"n_trees": [50], "mtry": ["sqrt", "N/3"]}, "gb": {"n_trees": [50, 100]},
              "ann": {"hidden": "1:N:15", "rate": [0.1]}},
    "importance": {"repeats": 3},
    "synthetic": {"n_trips": 10000, "end": "2015-05-17"},
}
path = out.parent / "demo.yaml"
path.write_text(yaml.safe_dump(cfg))

print("exit", main(["--config", str(path), "all", "-v"]))
for p in sorted(out.rglob("*")):
    if p.is_file():
        print(p.relative_to(out))
print((out / "reports" / "summary.md").read_text())
