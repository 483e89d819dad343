"""Command results as text and as a versioned JSON payload."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

SCHEMA = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


def digest(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()


@dataclass
class Report:
    command: str
    inputs_digest: str = ""
    lines: list[str] = field(default_factory=list)
    verdicts: dict[str, Any] = field(default_factory=dict)
    provenance: list[str] = field(default_factory=list)
    payload: dict[str, Any] = field(default_factory=dict)
    exit_code: int = EXIT_OK

    def add(self, *lines: str) -> None:
        self.lines.extend(lines)

    def text(self) -> str:
        out = []
        if self.provenance:
            out.append("provenance:")
            out += [f"  {p}" for p in self.provenance]
            out.append("")
        out += self.lines
        return "\n".join(out) + "\n"

    def to_json(self) -> str:
        doc = {
            "schema": SCHEMA,
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "exit_code": self.exit_code,
            "verdicts": self.verdicts,
            "provenance": self.provenance,
            "payload": self.payload,
            "lines": self.lines,
        }
        return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
