"""JSON certificate files written by the command-line tool."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from . import __version__

SCHEMA_VERSION = "1"
INLINE_LIMIT = 10**4


class CertificateFormatError(ValueError):
    pass


@dataclass
class CertificateFile:
    """One command run: what was asked, what came out, and how long it took.

    ``elements`` is inlined for sets of at most :data:`INLINE_LIMIT` elements;
    larger sets are referenced through ``set_path``.
    """

    command: list[str]
    spec: str
    verdict: str | None = None
    elements: list[int] | None = None
    set_path: str | None = None
    exponents: list[dict] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    result: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION
    tool_version: str = __version__

    def attach_elements(self, elements, sidecar: str | os.PathLike | None) -> None:
        elements = [int(x) for x in elements]
        if len(elements) <= INLINE_LIMIT:
            self.elements, self.set_path = elements, None
        else:
            if sidecar is None:
                raise ValueError("sets above the inline limit need a sidecar set file")
            self.elements, self.set_path = None, os.fspath(sidecar)

    def to_dict(self) -> dict:
        return {
            "schemaVersion": self.schema_version,
            "command": list(self.command),
            "spec": self.spec,
            "verdict": self.verdict,
            "elements": self.elements,
            "setPath": self.set_path,
            "exponents": self.exponents,
            "timings": self.timings,
            "result": self.result,
            "toolVersion": self.tool_version,
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def parse(cls, text: str) -> "CertificateFile":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateFormatError(f"not JSON: {exc}") from None
        if not isinstance(d, dict):
            raise CertificateFormatError("certificate must be a JSON object")
        if d.get("schemaVersion") != SCHEMA_VERSION:
            raise CertificateFormatError(f"unsupported schemaVersion {d.get('schemaVersion')!r}")
        try:
            return cls(
                command=d["command"],
                spec=d["spec"],
                verdict=d["verdict"],
                elements=d["elements"],
                set_path=d["setPath"],
                exponents=d["exponents"],
                timings=d["timings"],
                result=d["result"],
                schema_version=d["schemaVersion"],
                tool_version=d["toolVersion"],
            )
        except KeyError as exc:
            raise CertificateFormatError(f"missing field {exc}") from None

    def write(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.serialize())

    @classmethod
    def read(cls, path: str | os.PathLike) -> "CertificateFile":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read())
