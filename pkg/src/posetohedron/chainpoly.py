"""Chain case: interval blocks, the lattice polytope, and extension witnesses.

For a padded poset with a labeled chain q_0 < q_1 < ... < q_{r+1}, every
element falls into exactly one interval block B[i, j]: the set of positions
k where some extension may place it between q_{k-1} and q_k.  Summing the
coordinate simplices of those intervals with the block sizes as
multiplicities gives a generalized permutohedron whose integer points are
exactly the part-size vectors (|I_1|, ..., |I_{r+1}|) of extensions, and,
after the prefix-sum change of coordinates, the subposet vectors themselves.

All arithmetic in this module is exact integer arithmetic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import (
    DimensionTooLarge,
    InfeasibleError,
    NonLatticePointError,
    NotAChainError,
    PartitionError,
)
from .poset import (
    HAT0,
    HAT1,
    LinearExtension,
    Poset,
    Subposet,
    first_extension,
    is_padded,
)

# Eager z-caches hold 2^dim entries; past this the cache is skipped and z is
# computed per query.
Z_CACHE_MAX_DIM = 16
DEFAULT_MAX_DIM = 16


@dataclass(frozen=True)
class ChainData:
    """A padded poset decomposed into interval blocks along a chain.

    ``chain`` lists q_0 .. q_{r+1} (bounds included); ``blocks`` maps the
    1-based interval (i, j), i <= j <= r+1, to its element set, and ``b`` to
    its size.
    """

    padded: Poset
    chain: tuple[str, ...]
    blocks: dict[tuple[int, int], frozenset[str]] = field(hash=False)
    b: dict[tuple[int, int], int] = field(hash=False)

    @property
    def r(self) -> int:
        return len(self.chain) - 2

    @property
    def dim(self) -> int:
        return self.r + 1

    def interior_chain(self) -> tuple[str, ...]:
        return self.chain[1:-1]

    def block_of(self, element: str) -> tuple[int, int]:
        for ij, members in self.blocks.items():
            if element in members:
                return ij
        raise KeyError(element)

    def m_vector(self, ext: LinearExtension) -> tuple[int, ...]:
        """Part sizes (|I_1|, ..., |I_{r+1}|) of an extension of the padded poset.

        Part k collects the elements ranked in (rank(q_{k-1}), rank(q_k)];
        the bottom bound element itself counts into part 1.
        """
        ranks = [ext.rank[q] for q in self.chain]
        ranks[0] = 0
        return tuple(ranks[k] - ranks[k - 1] for k in range(1, len(ranks)))


def _position_interval(p: Poset, chain: tuple[str, ...], element: str) -> tuple[int, int]:
    # Feasible slots k: element can land strictly above q_{k-1} and weakly
    # below q_k.  hat0 is pinned to slot 1 by convention.
    if element == chain[0]:
        return (1, 1)
    r1 = len(chain) - 1  # == r + 1
    lo = max((m for m in range(r1 + 1) if p.less(chain[m], element)), default=0) + 1
    hi = min(m for m in range(r1 + 1) if p.leq(element, chain[m]))
    return (lo, hi)


def chain_decompose(p: Poset, q: Subposet) -> ChainData:
    """Partition the padded poset into interval blocks along the chain ``q``.

    The defining membership conditions are re-checked per element and block
    before returning; a zero or double match raises PartitionError, since it
    signals a broken order relation rather than a user mistake.
    """
    if not is_padded(p):
        raise ValueError("chain_decompose expects a padded poset")
    if q.parent is not p and q.parent != p:
        raise ValueError("subposet does not belong to the given poset")
    q.require_chain()
    chain = (HAT0,) + tuple(q.members) + (HAT1,)
    r1 = len(chain) - 1

    def matches(e: str, i: int, j: int) -> bool:
        if i == j == 1:
            return p.leq(chain[0], e) and p.leq(e, chain[1])
        if i == j:
            return p.less(chain[i - 1], e) and p.leq(e, chain[i])
        # Off-diagonal blocks hold elements strictly between q_{i-1} and q_j
        # that are not weakly above q_i nor weakly below q_{j-1}.
        return (
            p.less(chain[i - 1], e)
            and p.less(e, chain[j])
            and not p.leq(chain[i], e)
            and not p.leq(e, chain[j - 1])
        )

    assignment: dict[str, tuple[int, int]] = {}
    for e in p.elements:
        hits = [
            (i, j) for i in range(1, r1 + 1) for j in range(i, r1 + 1) if matches(e, i, j)
        ]
        if len(hits) != 1:
            raise PartitionError(
                f"element {e!r} matched blocks {hits}; expected exactly one"
            )
        assignment[e] = hits[0]
        if hits[0] != _position_interval(p, chain, e):
            raise PartitionError(
                f"element {e!r}: block {hits[0]} disagrees with its feasible slots"
            )

    blocks: dict[tuple[int, int], frozenset[str]] = {}
    b: dict[tuple[int, int], int] = {}
    for i in range(1, r1 + 1):
        for j in range(i, r1 + 1):
            members = frozenset(e for e, ij in assignment.items() if ij == (i, j))
            blocks[i, j] = members
            b[i, j] = len(members)
    if sum(b.values()) != len(p):
        raise PartitionError("blocks do not cover the padded poset")
    for i in range(1, r1 + 1):
        if b[i, i] < 1:
            raise PartitionError(f"diagonal block ({i},{i}) is empty")
    return ChainData(p, chain, blocks, b)


class GPerm:
    """A generalized permutohedron given by interval multiplicities.

    ``c`` maps intervals [i, j] of 1..dim to nonnegative integers.  The
    H-description follows from the multiplicities: the points with
    coordinate sum z(full) satisfying sum_{k in I} t_k <= z(I) for every
    subset I, where z(I) totals the multiplicity of intervals meeting I.
    """

    def __init__(self, dim: int, c: dict[tuple[int, int], int]):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.c = {
            (i, j): 0 for i in range(1, dim + 1) for j in range(i, dim + 1)
        }
        for (i, j), value in c.items():
            if not (1 <= i <= j <= dim):
                raise ValueError(f"interval ({i},{j}) out of range for dim {dim}")
            if value < 0:
                raise ValueError("multiplicities must be nonnegative")
            self.c[i, j] = value
        self._interval_masks = [
            (self._mask(i, j), value) for (i, j), value in self.c.items()
        ]
        self.total = sum(self.c.values())
        if dim <= Z_CACHE_MAX_DIM:
            zc = [0] * (1 << dim)
            for mask in range(1, 1 << dim):
                zc[mask] = self._z_direct(mask)
            self._zcache: list[int] | None = zc
        else:
            self._zcache = None

    @staticmethod
    def _mask(i: int, j: int) -> int:
        return ((1 << (j - i + 1)) - 1) << (i - 1)

    def _z_direct(self, mask: int) -> int:
        return sum(value for imask, value in self._interval_masks if imask & mask)

    def z(self, subset: int | Iterable[int]) -> int:
        """z(I) for a subset given as a bitmask or an iterable of 1-based indices."""
        mask = subset if isinstance(subset, int) else self.subset_mask(subset)
        if self._zcache is not None:
            return self._zcache[mask]
        return self._z_direct(mask)

    @staticmethod
    def subset_mask(indices: Iterable[int]) -> int:
        mask = 0
        for k in indices:
            mask |= 1 << (k - 1)
        return mask

    def contains(self, t: tuple[int, ...]) -> bool:
        """Exact membership test against the full inequality system."""
        if len(t) != self.dim:
            return False
        if sum(t) != self.total:
            return False
        full = (1 << self.dim) - 1
        for mask in range(1, full):
            s = sum(t[k] for k in range(self.dim) if mask >> k & 1)
            if s > self.z(mask):
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, GPerm) and self.dim == other.dim and self.c == other.c

    def __repr__(self):
        nonzero = {ij: v for ij, v in self.c.items() if v}
        return f"GPerm(dim={self.dim}, c={nonzero})"


def build_npq(cd: ChainData, max_dim: int = DEFAULT_MAX_DIM) -> GPerm:
    """The lattice polytope of part-size vectors, from the block sizes."""
    if cd.dim > max_dim:
        raise DimensionTooLarge(f"dimension {cd.dim} exceeds cap {max_dim}")
    return GPerm(cd.dim, dict(cd.b))


def lattice_points(g: GPerm, max_dim: int = DEFAULT_MAX_DIM) -> set[tuple[int, ...]]:
    """All integer points of ``g``, by bounded coordinate recursion.

    Prefix sums are pruned against z of the prefix set and of its
    complement; surviving candidates get the full membership check.
    """
    if g.dim > max_dim:
        raise DimensionTooLarge(f"dimension {g.dim} exceeds cap {max_dim}")
    n = g.dim
    full = (1 << n) - 1
    # Per-coordinate box and per-prefix caps, all derived from z.
    hi = [g.z(1 << k) for k in range(n)]
    lo = [max(0, g.total - g.z(full ^ (1 << k))) for k in range(n)]
    prefix_mask = [((1 << (k + 1)) - 1) for k in range(n)]
    points: set[tuple[int, ...]] = set()
    t = [0] * n

    def rec(k: int, acc: int):
        if k == n:
            candidate = tuple(t)
            if g.contains(candidate):
                points.add(candidate)
            return
        cap = g.z(prefix_mask[k]) - acc
        floor = g.total - g.z(full ^ prefix_mask[k]) - acc
        for value in range(max(lo[k], floor), min(hi[k], cap) + 1):
            t[k] = value
            rec(k + 1, acc + value)
        t[k] = 0

    rec(0, 0)
    return points


def to_subposet_coords(t: tuple[int, ...]) -> tuple[int, ...]:
    """Prefix sums, dropping the final (redundant) coordinate."""
    out = []
    acc = 0
    for value in t[:-1]:
        acc += value
        out.append(acc)
    return tuple(out)


def from_subposet_coords(c: tuple[int, ...], total: int) -> tuple[int, ...]:
    """Difference transform, appending total - c_r; inverse of the above."""
    out = []
    prev = 0
    for value in c:
        out.append(value - prev)
        prev = value
    out.append(total - prev)
    return tuple(out)


def _max_flow(capacity: dict[tuple[int, int], int], n_nodes: int, source: int, sink: int):
    # Edmonds-Karp on a dense adjacency dict; capacities are small integers.
    flow = {k: 0 for k in capacity}
    adj: dict[int, list[int]] = {v: [] for v in range(n_nodes)}
    for u, v in list(capacity):
        adj[u].append(v)
        adj[v].append(u)
        capacity.setdefault((v, u), 0)
        flow.setdefault((v, u), 0)
    total = 0
    while True:
        parent = {source: source}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v in adj[u]:
                if v not in parent and capacity[u, v] - flow[u, v] > 0:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            return total, flow
        bottleneck = None
        v = sink
        while v != source:
            u = parent[v]
            residual = capacity[u, v] - flow[u, v]
            bottleneck = residual if bottleneck is None else min(bottleneck, residual)
            v = u
        v = sink
        while v != source:
            u = parent[v]
            flow[u, v] += bottleneck
            flow[v, u] -= bottleneck
            v = u
        total += bottleneck


def decompose_lattice_point(
    g: GPerm, t: tuple[int, ...]
) -> dict[tuple[int, int], tuple[int, ...]]:
    """Split ``t`` into one integer point per weighted interval simplex.

    Solved as an integer feasible flow from intervals to coordinates; any
    maximum-flow split is acceptable, and the postconditions (support,
    per-interval totals, coordinate sums) are re-checked before returning.
    """
    if not g.contains(t):
        raise NonLatticePointError(f"{t} is not a lattice point")
    intervals = sorted(ij for ij, value in g.c.items() if value > 0)
    # Nodes: 0 = source, 1..m intervals, m+1..m+dim coordinates, last = sink.
    m = len(intervals)
    source, sink = 0, m + g.dim + 1
    capacity: dict[tuple[int, int], int] = {}
    for idx, (i, j) in enumerate(intervals, start=1):
        capacity[source, idx] = g.c[i, j]
        for k in range(i, j + 1):
            capacity[idx, m + k] = g.c[i, j]
    for k in range(1, g.dim + 1):
        capacity[m + k, sink] = t[k - 1]
    value, flow = _max_flow(capacity, sink + 1, source, sink)
    if value != g.total:
        raise InfeasibleError(
            f"flow decomposition of {t} failed: moved {value} of {g.total}"
        )
    out: dict[tuple[int, int], tuple[int, ...]] = {}
    for idx, (i, j) in enumerate(intervals, start=1):
        vec = [0] * g.dim
        for k in range(i, j + 1):
            vec[k - 1] = flow.get((idx, m + k), 0)
        assert sum(vec) == g.c[i, j]
        out[i, j] = tuple(vec)
    for k in range(g.dim):
        assert sum(vec[k] for vec in out.values()) == t[k]
    return out


@dataclass
class Witness:
    """A linear extension realizing a given part-size vector.

    ``assignment`` sends each padded element to its part index; prefix
    unions of the parts are order ideals and part k has size t_k.
    """

    assignment: dict[str, int]
    extension: LinearExtension

    def parts(self, dim: int) -> list[set[str]]:
        out = [set() for _ in range(dim)]
        for e, k in self.assignment.items():
            out[k - 1].add(e)
        return out


class _SwitchState:
    """Mutable element -> (interval, slot) table driving inversion switching."""

    def __init__(self, padded: Poset, placement: dict[str, tuple[tuple[int, int], int]]):
        self.padded = padded
        self.placement = placement

    def inversions(self) -> list[tuple[str, str]]:
        # (x, y) with x strictly above y's part yet x < y in the order.
        out = []
        for x, y in self.padded.lt:
            if self.placement[x][1] > self.placement[y][1]:
                out.append((x, y))
        return out

    def switch_once(self) -> bool:
        """One step of the switching loop; False when no inversion remains."""
        inversions = self.inversions()
        if not inversions:
            return False
        gap = min(self.placement[x][1] - self.placement[y][1] for x, y in inversions)
        pool = [
            (x, y)
            for x, y in inversions
            if self.placement[x][1] - self.placement[y][1] == gap
        ]
        uppers = {x for x, _ in pool}
        lowers = {y for _, y in pool}
        # Pick a minimal-gap pair that no other minimal-gap pair chains into:
        # x must not sit above another pool pair, y must not sit below one.
        eligible = [(x, y) for x, y in pool if x not in lowers and y not in uppers]
        assert eligible, "switch selection rule found no admissible pair"
        x, y = min(eligible)
        (ij_x, k_x) = self.placement[x]
        (ij_y, k_y) = self.placement[y]
        # The slot swap stays inside both intervals: x < y forces the
        # intervals to be nested enough that both slots are shared.
        assert ij_x[0] <= k_y <= ij_x[1] and ij_y[0] <= k_x <= ij_y[1]
        before = len(inversions)
        self.placement[x] = (ij_x, k_y)
        self.placement[y] = (ij_y, k_x)
        after = len(self.inversions())
        assert after < before, "switching must strictly reduce inversions"
        return True

    def run(self) -> None:
        while self.switch_once():
            pass


def witness(cd: ChainData, t: tuple[int, ...]) -> Witness:
    """Construct an extension whose part-size vector is the lattice point ``t``.

    Splits ``t`` across the interval blocks, cuts each block along a fixed
    internal linear order, then repairs cross-block inversions by the
    switching rule until every prefix union is an order ideal.
    """
    g = build_npq(cd)
    if not g.contains(t):
        raise NonLatticePointError(f"{t} is not a lattice point of this polytope")
    split = decompose_lattice_point(g, t)

    placement: dict[str, tuple[tuple[int, int], int]] = {}
    for (i, j), members in cd.blocks.items():
        if not members:
            continue
        # Cut the block along one of its linear orders; earlier slots take
        # lower segments so the cut itself introduces no inversions.
        ordered = first_extension(cd.padded.restrict(members)).order()
        counts = split.get((i, j), tuple(0 for _ in range(cd.dim)))
        pos = 0
        for k in range(i, j + 1):
            for e in ordered[pos : pos + counts[k - 1]]:
                placement[e] = ((i, j), k)
            pos += counts[k - 1]
        assert pos == len(ordered)

    state = _SwitchState(cd.padded, placement)
    state.run()

    assignment = {e: slot for e, ((_, _), slot) in state.placement.items()}
    parts: list[list[str]] = [[] for _ in range(cd.dim)]
    for e, slot in assignment.items():
        parts[slot - 1].append(e)
    rank: dict[str, int] = {}
    next_rank = 1
    for part in parts:
        ordered = first_extension(cd.padded.restrict(part)).order() if part else []
        for e in ordered:
            rank[e] = next_rank
            next_rank += 1
    ext = LinearExtension(rank)
    assert ext.is_valid_for(cd.padded), "witness extension violates the order"
    assert cd.m_vector(ext) == t, "witness extension realizes the wrong point"
    for idx, q in enumerate(cd.chain[1:], start=1):
        assert assignment[q] == idx
    return Witness(assignment, ext)


def oracle_m_points(cd: ChainData, force: bool = False) -> set[tuple[int, ...]]:
    """Part-size vectors of all extensions, by brute force."""
    from .poset import linear_extensions

    return {cd.m_vector(ext) for ext in linear_extensions(cd.padded, force=force)}
