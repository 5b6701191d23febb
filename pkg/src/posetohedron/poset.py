"""Finite posets, subposets, and the brute-force linear-extension oracle.

Every other module grounds its correctness in this one: extensions are
enumerated by plain backtracking, so the results are trustworthy at desk
scale and deliberately refuse to run on large inputs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import (
    CapExceededError,
    CycleError,
    DuplicateElementError,
    NotAChainError,
    ReservedElementError,
    SubposetLabelError,
    UnknownElementError,
)

HAT0 = "hat0"
HAT1 = "hat1"
RESERVED_IDS = frozenset({HAT0, HAT1})

# Extension enumeration refuses larger ground sets unless forced; e(P) can
# explode well before memory does.
DEFAULT_MAX_ELEMENTS = 20


def max_elements_cap() -> int:
    value = os.environ.get("POSETOHEDRON_MAX_P")
    if value is None:
        return DEFAULT_MAX_ELEMENTS
    return int(value)


@dataclass(frozen=True)
class Poset:
    """A finite strict partial order, stored transitively closed.

    ``elements`` keeps the user-given order; ``lt`` holds ordered pairs
    (a, b) meaning a < b.
    """

    elements: tuple[str, ...]
    lt: frozenset[tuple[str, str]]

    def __post_init__(self):
        index = {e: i for i, e in enumerate(self.elements)}
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, e: str) -> bool:
        return e in self._index

    def less(self, a: str, b: str) -> bool:
        return (a, b) in self.lt

    def leq(self, a: str, b: str) -> bool:
        return a == b or (a, b) in self.lt

    def incomparable(self, a: str, b: str) -> bool:
        return a != b and (a, b) not in self.lt and (b, a) not in self.lt

    def down_set(self, b: str) -> set[str]:
        return {a for a in self.elements if (a, b) in self.lt}

    def up_set(self, a: str) -> set[str]:
        return {b for b in self.elements if (a, b) in self.lt}

    def restrict(self, keep: Iterable[str]) -> "Poset":
        """Induced subposet on ``keep``, preserving element order."""
        keep = set(keep)
        elems = tuple(e for e in self.elements if e in keep)
        lt = frozenset(p for p in self.lt if p[0] in keep and p[1] in keep)
        return Poset(elems, lt)

    def covers(self) -> list[tuple[str, str]]:
        """Hasse-diagram edges: pairs a < b with nothing in between."""
        out = []
        for a, b in self.lt:
            if not any((a, c) in self.lt and (c, b) in self.lt for c in self.elements):
                out.append((a, b))
        return sorted(out)

    def is_chain(self, members: Iterable[str]) -> bool:
        members = list(members)
        return all(
            not self.incomparable(a, b)
            for i, a in enumerate(members)
            for b in members[i + 1 :]
        )


@dataclass(frozen=True)
class Subposet:
    """An induced subposet with a fixed labeling q_1..q_r.

    The labeling must be compatible with the parent order: q_i < q_j in the
    parent forces i < j.
    """

    parent: Poset
    members: tuple[str, ...]

    def __post_init__(self):
        seen = set()
        for m in self.members:
            if m not in self.parent:
                raise UnknownElementError(f"subposet member {m!r} not in poset")
            if m in seen:
                raise DuplicateElementError(f"duplicate subposet member {m!r}")
            seen.add(m)
        for i, a in enumerate(self.members):
            for b in self.members[i + 1 :]:
                if self.parent.less(b, a):
                    raise SubposetLabelError(
                        f"label order violated: {b!r} < {a!r} in parent"
                    )

    def __len__(self) -> int:
        return len(self.members)

    def reparent(self, parent: Poset) -> "Subposet":
        return Subposet(parent, self.members)

    def as_poset(self) -> Poset:
        return self.parent.restrict(self.members)

    def require_chain(self) -> None:
        if not self.parent.is_chain(self.members):
            raise NotAChainError(f"subposet {self.members} is not a chain")


@dataclass(frozen=True)
class LinearExtension:
    """Order-preserving bijection onto 1..n, stored as element -> rank."""

    rank: dict[str, int] = field(hash=False)

    def order(self) -> list[str]:
        return sorted(self.rank, key=self.rank.get)

    def vector(self, members: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.rank[m] for m in members)

    def is_valid_for(self, p: Poset) -> bool:
        ranks = sorted(self.rank.values())
        if set(self.rank) != set(p.elements) or ranks != list(range(1, len(p) + 1)):
            return False
        return all(self.rank[a] < self.rank[b] for a, b in p.lt)


def _transitive_closure(elements, pairs):
    below = {e: set() for e in elements}  # below[b] = {a : a < b}
    for a, b in pairs:
        below[b].add(a)
    changed = True
    while changed:
        changed = False
        for b in elements:
            extra = set()
            for a in below[b]:
                extra |= below[a] - below[b]
            if extra:
                below[b] |= extra
                changed = True
    return frozenset((a, b) for b in elements for a in below[b])


def build_poset(
    elements: Iterable[str],
    relations: Iterable[tuple[str, str]],
    allow_reserved: bool = False,
) -> Poset:
    """Transitively close ``relations`` over ``elements`` and validate.

    Raises CycleError when the closure has a loop, DuplicateElementError on
    repeated ids, UnknownElementError on stray relation endpoints, and
    ReservedElementError when user input claims a bound-element id.
    """
    elements = tuple(elements)
    seen = set()
    for e in elements:
        if e in seen:
            raise DuplicateElementError(f"duplicate element {e!r}")
        seen.add(e)
        if not allow_reserved and e in RESERVED_IDS:
            raise ReservedElementError(f"element id {e!r} is reserved")
    pairs = []
    for a, b in relations:
        if a not in seen:
            raise UnknownElementError(f"relation endpoint {a!r} not in elements")
        if b not in seen:
            raise UnknownElementError(f"relation endpoint {b!r} not in elements")
        pairs.append((a, b))
    lt = _transitive_closure(elements, pairs)
    for e in elements:
        if (e, e) in lt:
            raise CycleError(f"cycle through {e!r}")
    return Poset(elements, lt)


def pad(p: Poset) -> Poset:
    """Adjoin a global minimum and maximum with the reserved ids."""
    elements = (HAT0,) + p.elements + (HAT1,)
    lt = set(p.lt)
    for e in p.elements:
        lt.add((HAT0, e))
        lt.add((e, HAT1))
    lt.add((HAT0, HAT1))
    return Poset(elements, frozenset(lt))


def is_padded(p: Poset) -> bool:
    return HAT0 in p and HAT1 in p


def linear_extensions(p: Poset, force: bool = False) -> Iterator[LinearExtension]:
    """Yield every linear extension exactly once.

    Backtracks over the currently-minimal elements, trying candidates in
    element-id order so the stream is deterministic.
    """
    n = len(p)
    if n > max_elements_cap() and not force:
        raise CapExceededError(
            f"|P| = {n} exceeds cap {max_elements_cap()}; pass force to override"
        )
    preds = {e: p.down_set(e) for e in p.elements}
    order_sorted = sorted(p.elements)
    placed: list[str] = []
    placed_set: set[str] = set()

    def backtrack() -> Iterator[LinearExtension]:
        if len(placed) == n:
            yield LinearExtension({e: i + 1 for i, e in enumerate(placed)})
            return
        for e in order_sorted:
            if e in placed_set or not preds[e] <= placed_set:
                continue
            placed.append(e)
            placed_set.add(e)
            yield from backtrack()
            placed.pop()
            placed_set.remove(e)

    return backtrack()


def count_extensions(p: Poset, limit: int | None = None, force: bool = True) -> int | None:
    """Number of linear extensions; None when ``limit`` is exceeded."""
    count = 0
    for _ in linear_extensions(p, force=force):
        count += 1
        if limit is not None and count > limit:
            return None
    return count


def first_extension(p: Poset) -> LinearExtension:
    """The id-lexicographically first extension (deterministic tie-break)."""
    return next(linear_extensions(p, force=True))


def subposet_vectors(p: Poset, q: Subposet, force: bool = False) -> set[tuple[int, ...]]:
    """All restrictions of linear extensions of ``p`` to the labels of ``q``."""
    return {ext.vector(q.members) for ext in linear_extensions(p, force=force)}


def young_poset(shape: Iterable[int]) -> tuple[Poset, dict[tuple[int, int], str]]:
    """Poset of diagram cells, increasing along rows and down columns.

    ``shape`` must be a weakly decreasing list of positive integers.  Linear
    extensions correspond to the standard fillings of the diagram.
    """
    shape = list(shape)
    if any(x <= 0 for x in shape) or any(
        shape[i] < shape[i + 1] for i in range(len(shape) - 1)
    ):
        raise ValueError("shape must be weakly decreasing and positive")
    cells = [(r, c) for r, width in enumerate(shape, start=1) for c in range(1, width + 1)]
    ids = {cell: f"c{cell[0]}_{cell[1]}" for cell in cells}
    covers = []
    for r, c in cells:
        if (r, c + 1) in ids:
            covers.append((ids[r, c], ids[r, c + 1]))
        if (r + 1, c) in ids:
            covers.append((ids[r, c], ids[r + 1, c]))
    return build_poset([ids[cell] for cell in cells], covers), ids


def shifted_young_poset(
    n: int, shape: Iterable[int] = ()
) -> tuple[Poset, dict[tuple[int, int], str], list[str]]:
    """Shifted diagram poset; also returns the diagonal cells in label order.

    Row r spans columns r .. n + shape_r, so the bare ``shape = ()`` case is
    the staircase.  The diagonal cells (r, r) form a chain and are the
    natural choice of labeled subposet.
    """
    shape = list(shape)
    if len(shape) > n:
        raise ValueError("shape has more parts than n")
    if any(x < 0 for x in shape) or any(
        shape[i] < shape[i + 1] for i in range(len(shape) - 1)
    ):
        raise ValueError("shape must be weakly decreasing and nonnegative")
    shape += [0] * (n - len(shape))
    cells = [(r, c) for r in range(1, n + 1) for c in range(r, n + shape[r - 1] + 1)]
    ids = {cell: f"c{cell[0]}_{cell[1]}" for cell in cells}
    covers = []
    for r, c in cells:
        if (r, c + 1) in ids:
            covers.append((ids[r, c], ids[r, c + 1]))
        if (r + 1, c) in ids:
            covers.append((ids[r, c], ids[r + 1, c]))
    poset = build_poset([ids[cell] for cell in cells], covers)
    diagonal = [ids[r, r] for r in range(1, n + 1)]
    return poset, ids, diagonal
