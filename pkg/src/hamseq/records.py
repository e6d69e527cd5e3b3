from __future__ import annotations

from dataclasses import dataclass

KINDS = ("mapped", "junction", "attach", "marker", "seed")


@dataclass(frozen=True)
class EdgeRecord:
    """One entry of the edge sequence: an endpoint pair plus bookkeeping.

    `kind` says where the record came from: produced by mapping, inserted as
    a junction between a tip and its successor, inserted by an attachment
    repair, a doubled self-marker for an unmapped vertex, or the seed edge.
    """

    a: int
    b: int
    sync: bool = False
    seq: int = 0
    kind: str = "mapped"

    def touches(self, w: int) -> bool:
        return self.a == w or self.b == w

    def other(self, w: int) -> int:
        return self.b if self.a == w else self.a

    @property
    def pair(self) -> tuple[int, int]:
        return (self.a, self.b)

    def synced(self) -> EdgeRecord:
        return EdgeRecord(self.a, self.b, True, self.seq, self.kind)

    def to_list(self) -> list:
        return [self.a, self.b, int(self.sync), self.seq, self.kind]


def incidence(le, w: int) -> int:
    n = 0
    for r in le:
        if r.a == w:
            n += 1
        if r.b == w:
            n += 1
    return n
