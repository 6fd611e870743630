"""Pointed finite sets and basepoint-preserving maps.

``PointedMap`` models a map <n> -> <m>: the non-basepoint elements are
0..n-1 and the basepoint is ``None``.  Inert maps have singleton fibers over
every non-basepoint element; active maps hit the basepoint only from the
basepoint.  Both corolla-counting functors land here.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PointedMap:
    n_source: int
    n_target: int
    values: tuple  # length n_source; entries in range(n_target) or None

    def __post_init__(self):
        if len(self.values) != self.n_source:
            raise ValueError("values length must equal n_source")
        for v in self.values:
            if v is not None and not (0 <= v < self.n_target):
                raise ValueError(f"value {v} out of range")

    def __call__(self, i):
        """Apply to a source element; ``None`` is the basepoint."""
        if i is None:
            return None
        return self.values[i]

    def fiber(self, j) -> tuple:
        """Non-basepoint preimage of target element j (or of the basepoint)."""
        return tuple(i for i in range(self.n_source) if self.values[i] == j)

    def is_inert(self) -> bool:
        return all(len(self.fiber(j)) == 1 for j in range(self.n_target))

    def is_active(self) -> bool:
        return all(v is not None for v in self.values)

    def is_iso(self) -> bool:
        return self.is_inert() and self.is_active()


def identity(n: int) -> PointedMap:
    return PointedMap(n, n, tuple(range(n)))


def compose(g: PointedMap, f: PointedMap) -> PointedMap:
    """g after f."""
    if f.n_target != g.n_source:
        raise ValueError("not composable")
    return PointedMap(f.n_source, g.n_target, tuple(g(v) for v in f.values))


def rho(n: int, i: int) -> PointedMap:
    """The inert projection <n> -> <1> keeping only element i."""
    return PointedMap(n, 1, tuple(0 if j == i else None for j in range(n)))
