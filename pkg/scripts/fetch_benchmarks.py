#!/usr/bin/env python3
"""Download public SATLIB benchmark archives into benchmarks/.

The toolkit bundles a random 3-SAT generator for self-contained runs
(`satgp gen`); this script additionally fetches the classic uniform
random 3-SAT suites when network access is available.  Archives land in
benchmarks/ and are unpacked into per-suite directories.

Usage: python scripts/fetch_benchmarks.py [suite ...]
Suites: uf20, uf50, uf100 (default: uf20 uf50)
"""

import sys
import tarfile
import urllib.request
from pathlib import Path

BASE = "https://www.cs.ubc.ca/~hoos/SATLIB/Benchmarks/SAT/RND3SAT"
SUITES = {
    "uf20": f"{BASE}/uf20-91.tar.gz",
    "uf50": f"{BASE}/uf50-218.tar.gz",
    "uf100": f"{BASE}/uf100-430.tar.gz",
}


def fetch(suite: str, dest_root: Path) -> None:
    url = SUITES[suite]
    dest = dest_root / suite
    dest.mkdir(parents=True, exist_ok=True)
    archive = dest_root / Path(url).name
    if not archive.exists():
        print(f"downloading {url}")
        urllib.request.urlretrieve(url, archive)
    print(f"unpacking {archive} -> {dest}")
    with tarfile.open(archive) as tar:
        tar.extractall(dest)


def main(argv) -> int:
    suites = argv[1:] or ["uf20", "uf50"]
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        print(f"unknown suite(s): {', '.join(unknown)}", file=sys.stderr)
        print(f"available: {', '.join(SUITES)}", file=sys.stderr)
        return 1
    dest_root = Path(__file__).resolve().parent.parent / "benchmarks"
    for suite in suites:
        fetch(suite, dest_root)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
