from __future__ import annotations

import os
from pathlib import Path

import pytest

from gausslat.shortvec import ShortVectorCache


@pytest.fixture(scope="session")
def sv_cache() -> ShortVectorCache:
    """Shared on-disk short vector cache; entries are hash checked on load."""
    root = os.environ.get("GAUSSLAT_CACHE") or str(Path.home() / ".cache" / "gausslat")
    return ShortVectorCache(root)


@pytest.fixture(scope="session")
def threads() -> int:
    return min(4, os.cpu_count() or 1)


# one verdict line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def record():
    def _record(criterion: int, check: str, ok: bool, detail: str = "") -> bool:
        ACCEPTANCE.setdefault(criterion, []).append((check, bool(ok), detail))
        print(f"criterion {criterion} [{check}]: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[n]
        failed = [c for c in checks if not c[1]]
        verdict = "PASS" if not failed else "FAIL"
        note = "; ".join(f"{c[0]}: {c[2]}" for c in failed)
        tr.write_line(f"criterion {n}: {verdict} ({len(checks) - len(failed)}/{len(checks)} checks){' ' + note if note else ''}")
