"""Association primitives: one cross-graph pair and injective sets of them."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class MatchLevel(Enum):
    ROOM = "room"
    WALL_SURFACE = "wall_surface"


@dataclass(frozen=True)
class MatchPair:
    """An association between one plan-graph node and one observed-graph node."""

    level: MatchLevel
    a_node: str
    s_node: str

    def __post_init__(self):
        object.__setattr__(self, "_key", (self.level.value, self.a_node, self.s_node))

    def sort_key(self) -> tuple[str, str, str]:
        return self._key

    def __lt__(self, other: "MatchPair") -> bool:
        return self._key < other._key


@dataclass(frozen=True)
class MatchSet:
    """A both-ways-injective set of pairs; ``level`` is None for mixed-level sets."""

    pairs: frozenset[MatchPair]
    level: MatchLevel | None = None

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        if self.level is not None:
            for p in self.pairs:
                if p.level is not self.level:
                    raise ValueError(f"pair {p} does not belong to level {self.level}")
        check_injective(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def at_level(self, level: MatchLevel) -> frozenset[MatchPair]:
        return frozenset(p for p in self.pairs if p.level is level)

    def room_key(self) -> tuple[tuple[str, str], ...]:
        """Canonical identity of the room-level content, used for grouping."""
        return tuple(sorted((p.a_node, p.s_node) for p in self.at_level(MatchLevel.ROOM)))

    def canonical(self) -> tuple[MatchPair, ...]:
        cached = getattr(self, "_canonical", None)
        if cached is None:
            cached = tuple(sorted(self.pairs, key=MatchPair.sort_key))
            object.__setattr__(self, "_canonical", cached)
        return cached

    def as_id_pairs(self) -> set[tuple[str, str]]:
        return {(p.a_node, p.s_node) for p in self.pairs}


def check_injective(pairs) -> bool:
    """True when no plan node or observed node appears twice at the same level."""
    seen_a: set[tuple[MatchLevel, str]] = set()
    seen_s: set[tuple[MatchLevel, str]] = set()
    for p in pairs:
        if (p.level, p.a_node) in seen_a or (p.level, p.s_node) in seen_s:
            raise ValueError(f"match set is not injective at {p}")
        seen_a.add((p.level, p.a_node))
        seen_s.add((p.level, p.s_node))
    return True


def is_injective(pairs) -> bool:
    try:
        check_injective(pairs)
        return True
    except ValueError:
        return False
