"""Deterministic certificate reports.

JSON output is the CI contract: keys sorted, the run seed echoed, and the
volatile wall-clock fields normalized to 0 so identical runs are
byte-identical; real timings go to the text format.  A sha256 content
hash over the normalized payload ties a report to its inputs.
"""

from __future__ import annotations

import hashlib
import json

from .certify import Certificate

TOOL_VERSION = "0.1.0"


def canonical_json(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def report_payload(certs: list[Certificate], run_config: dict) -> dict:
    counts = {"verified": 0, "refuted": 0, "skipped": 0}
    for c in certs:
        counts[c.status] = counts.get(c.status, 0) + 1
    body = {
        "tool_version": TOOL_VERSION,
        "run_config": dict(sorted(run_config.items())),
        "certificates": [c.as_dict(deterministic=True) for c in certs],
        "summary": counts,
    }
    body["content_hash"] = hashlib.sha256(canonical_json(body).encode()).hexdigest()
    return body


def emit_report(certs: list[Certificate], fmt: str, run_config: dict) -> str:
    """Serialize certificates; 'json' is deterministic, 'text' is for eyes."""
    if fmt == "json":
        return json.dumps(report_payload(certs, run_config), sort_keys=True, indent=2) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = []
    for c in certs:
        lines.append(f"[{c.status.upper():8s}] {c.claim}  {c.parameters}  ({c.elapsed_ms:.0f} ms)")
        for key, val in c.evidence.items():
            if isinstance(val, dict) and "status" in val:
                lines.append(f"    - {key}: {val['status']}")
            elif isinstance(val, (int, float, str, bool)):
                lines.append(f"    - {key}: {val}")
    counts = {"verified": 0, "refuted": 0, "skipped": 0}
    for c in certs:
        counts[c.status] += 1
    lines.append(
        f"summary: {counts['verified']} verified, {counts['refuted']} refuted, "
        f"{counts['skipped']} skipped"
    )
    return "\n".join(lines) + "\n"
