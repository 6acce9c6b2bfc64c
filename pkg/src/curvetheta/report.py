"""Suite reports: named residual checks with thresholds and statuses."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__

SCHEMA_VERSION = 1

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped-needs-data"


@dataclass
class Check:
    check_id: str
    identity: str
    residual: float | None
    threshold: float | None
    status: str
    detail: str = ""

    def row(self) -> dict:
        return {
            "id": self.check_id,
            "identity": self.identity,
            "residual": self.residual,
            "threshold": self.threshold,
            "status": self.status,
            "detail": self.detail,
        }


@dataclass
class SuiteReport:
    suite: str
    seed: int
    precision: str = "double"
    threads: int = 1
    tolerances: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def add(self, check_id: str, identity: str, residual, threshold,
            detail: str = "") -> Check:
        """Record a residual check; status is derived from the numbers only."""
        threshold = self.tolerances.get(check_id, threshold)
        residual = None if residual is None else float(np.real_if_close(residual))
        status = PASS if (residual is not None and residual <= threshold) else FAIL
        chk = Check(check_id, identity, residual, threshold, status, detail)
        self.checks.append(chk)
        return chk

    def skip(self, check_id: str, identity: str, reason: str) -> Check:
        chk = Check(check_id, identity, None, None, SKIPPED, reason)
        self.checks.append(chk)
        return chk

    @property
    def failed(self) -> list:
        return [c for c in self.checks if c.status == FAIL]

    def merge(self, other: "SuiteReport") -> None:
        self.checks.extend(other.checks)

    def to_dict(self) -> dict:
        env = {
            "package_version": __version__,
            "numpy_version": np.__version__,
            "precision": self.precision,
            "threads": self.threads,
        }
        return {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "seed": self.seed,
            "tolerances": dict(sorted(self.tolerances.items())),
            "environment": env,
            "counts": {
                "pass": sum(1 for c in self.checks if c.status == PASS),
                "fail": sum(1 for c in self.checks if c.status == FAIL),
                "skipped": sum(1 for c in self.checks if c.status == SKIPPED),
            },
            "checks": [c.row() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def summary_lines(self) -> list[str]:
        out = []
        for c in self.checks:
            if c.status == SKIPPED:
                out.append(f"[skip] {c.check_id}: {c.detail}")
            else:
                mark = "ok  " if c.status == PASS else "FAIL"
                out.append(f"[{mark}] {c.check_id}: residual {c.residual:.3e}"
                           f" (threshold {c.threshold:.1e})")
        return out
