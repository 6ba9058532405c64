#!/usr/bin/env python3
"""Write the benchmark datasets in UCI file layout into a data directory.

iris.data and wine.data come from scikit-learn's bundled copies; the two
Iris rows that differ from the UCI file (samples 35 and 38) are restored to
their UCI values. letter-recognition.data comes from the keel-ds package
(pip install keel-ds) and is rewritten label-first. The Banknote file has no
packaged source; place data_banknote_authentication.txt in the directory by
hand.

usage: export_datasets.py [OUT_DIR]   (default: $APSTAB_DATA_DIR or ./data)
"""

import os
import sys
from pathlib import Path


def _num(v) -> str:
    text = repr(float(v))
    return text[:-2] if text.endswith(".0") else text


def export_iris(out: Path) -> None:
    from sklearn.datasets import load_iris

    ds = load_iris()
    x = ds.data.copy()
    x[34] = [4.9, 3.1, 1.5, 0.1]
    x[37] = [4.9, 3.1, 1.5, 0.1]
    names = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]
    with open(out / "iris.data", "w") as f:
        for row, label in zip(x, ds.target):
            f.write(",".join(f"{v:.1f}" for v in row) + f",{names[label]}\n")


def export_wine(out: Path) -> None:
    from sklearn.datasets import load_wine

    ds = load_wine()
    with open(out / "wine.data", "w") as f:
        for row, label in zip(ds.data, ds.target):
            f.write(f"{label + 1}," + ",".join(_num(v) for v in row) + "\n")


def export_letter(out: Path) -> bool:
    try:
        import keel_ds
    except ImportError:
        print("letter: keel-ds not installed, skipped (pip install keel-ds)", file=sys.stderr)
        return False
    src = Path(keel_ds.__file__).parent / "data" / "balanced" / "raw" / "letter.dat"
    if not src.exists():
        print(f"letter: {src} missing, skipped", file=sys.stderr)
        return False
    rows = []
    for line in src.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        fields = [t.strip() for t in line.split(",")]
        rows.append(fields[-1] + "," + ",".join(fields[:-1]))
    (out / "letter-recognition.data").write_text("\n".join(rows) + "\n")
    return True


def main() -> int:
    out = Path(sys.argv[1] if len(sys.argv) > 1 else os.environ.get("APSTAB_DATA_DIR", "data"))
    out.mkdir(parents=True, exist_ok=True)
    export_iris(out)
    export_wine(out)
    export_letter(out)
    for name in sorted(p.name for p in out.iterdir()):
        print(out / name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
