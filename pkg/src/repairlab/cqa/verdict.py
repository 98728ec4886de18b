"""Result type shared by the consistent-query-answering engines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..model.data import Instance


@dataclass(frozen=True)
class CqaVerdict:
    """Whether a sentence is true in every repair.

    When it is not, ``witness`` may hold a repair in which the sentence is false.
    """

    consistent: bool
    witness: Optional[Instance] = None
    engine: str = ""

    def __bool__(self) -> bool:
        return self.consistent

    def to_json(self) -> dict:
        from ..textio import instance_to_json
        out: dict = {"consistent": self.consistent, "engine": self.engine}
        if self.witness is not None:
            out["witness"] = instance_to_json(self.witness)
        return out
