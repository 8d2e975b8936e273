"""Builds the extension module and exercises its main entry points."""

import shutil
import subprocess
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build() -> Path:
    subprocess.run(
        ["cargo", "build", "--release", "-p", "schouten-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libschouten.so"
    out = Path(tempfile.mkdtemp()) / "schouten.so"
    shutil.copy(lib, out)
    return out.parent


def main() -> None:
    sys.path.insert(0, str(build()))
    import schouten

    p = schouten.Polynomial("alpha^2 - 1/2*beta")
    assert p.eval({"alpha": 3, "beta": "1/3"}) == Fraction(53, 6)
    assert str(p * p - p * p) == "0"
    assert schouten.Polynomial(str(p)) == p

    g1 = schouten.Family("g1")
    rows, s = schouten.ricci(g1, "lc")
    assert str(s) == "3/2*beta^2", s
    assert str(rows[0][0]) == "1/2*beta^2"

    residuals = schouten.system(schouten.Family("g4", eta=-1), "kn")
    assert [k for k, _ in residuals][:3] == ["12.1", "12.2", "12.3"]

    scan = schouten.scan(schouten.Family("g5"), "kn", seed=1, count=10)
    assert all(e["solvable"] for e in scan["entries"])

    report = schouten.verify(seed=0, only="4.8")
    assert report["summary"]["failed"] == 0, report["summary"]

    try:
        schouten.Family("g4")
    except ValueError:
        pass
    else:
        raise AssertionError("g4 without eta must be rejected")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
