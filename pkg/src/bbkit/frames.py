"""Finite transitive Kripke frames: structure, measures, enumeration,
and subreduction search.

Frames are stored as successor bitmasks; reflexivity lives on the
matrix diagonal.  All enumeration is deterministic, and the
nonisomorphic enumerator is cross-checked against brute force in the
test suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class KripkeFrame:
    n: int
    succ: tuple[int, ...]   # succ[i] bit j set  iff  i < j (strictly: i sees j)

    def __post_init__(self) -> None:
        assert self.n >= 0 and len(self.succ) == self.n
        full = (1 << self.n) - 1
        assert all(0 <= s <= full for s in self.succ)
        # transitivity: succ[j] subset of succ[i] whenever i sees j
        for i in range(self.n):
            m = self.succ[i]
            j = 0
            rest = m
            while rest:
                if rest & 1:
                    assert self.succ[j] & ~m == 0, "relation is not transitive"
                rest >>= 1
                j += 1

    def sees(self, i: int, j: int) -> bool:
        return bool(self.succ[i] >> j & 1)

    def reflexive(self, i: int) -> bool:
        return self.sees(i, i)

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(self.n)
                if self.sees(i, j)]

    def up_incl(self, i: int) -> int:
        """Bitmask of j with i <= j (reflexive closure of seeing)."""
        return self.succ[i] | (1 << i)


def frame_from_pairs(n: int, pairs, reflexive=()) -> KripkeFrame:
    succ = [0] * n
    for i, j in pairs:
        succ[i] |= 1 << j
    for i in reflexive:
        succ[i] |= 1 << i
    return KripkeFrame(n, tuple(succ))


def transitive_closure(n: int, succ: list[int]) -> tuple[int, ...]:
    out = list(succ)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            m = out[i]
            acc = m
            j, rest = 0, m
            while rest:
                if rest & 1:
                    acc |= out[j]
                rest >>= 1
                j += 1
            if acc != m:
                out[i] = acc
                changed = True
    return tuple(out)


# -- clusters, skeleton, measures ------------------------------------------

def clusters(frame: KripkeFrame) -> list[list[int]]:
    """Equivalence classes of mutual accessibility, in order of their
    smallest member."""
    n = frame.n
    rep: dict[int, int] = {}
    out: list[list[int]] = []
    for i in range(n):
        if i in rep:
            continue
        cls = [i]
        rep[i] = len(out)
        for j in range(i + 1, n):
            if j not in rep and frame.sees(i, j) and frame.sees(j, i):
                cls.append(j)
                rep[j] = len(out)
        out.append(cls)
    return out


def skeleton(frame: KripkeFrame) -> tuple[list[list[int]], list[int]]:
    """(clusters, strict successor bitmasks between clusters)."""
    cls = clusters(frame)
    idx = {}
    for c, members in enumerate(cls):
        for x in members:
            idx[x] = c
    m = len(cls)
    succ = [0] * m
    for c, members in enumerate(cls):
        x = members[0]
        for d in range(m):
            if d != c and frame.sees(x, cls[d][0]):
                succ[c] |= 1 << d
    return cls, succ


def _immediate(succ: list[int], c: int) -> list[int]:
    """Immediate successors in a strict order given by bitmasks."""
    out = []
    m = succ[c]
    d = 0
    rest = m
    while rest:
        if rest & 1:
            if not any((m >> e & 1) and (succ[e] >> d & 1)
                       for e in range(len(succ)) if e != d):
                out.append(d)
        rest >>= 1
        d += 1
    return out


def branching(frame: KripkeFrame) -> int:
    """Largest number of immediate successor clusters of any cluster."""
    cls, succ = skeleton(frame)
    if not cls:
        return 0
    return max((len(_immediate(succ, c)) for c in range(len(cls))), default=0)


def width(frame: KripkeFrame) -> int:
    """Largest antichain of clusters (in the rooted part this is the
    usual width; computed on the whole skeleton)."""
    cls, succ = skeleton(frame)
    m = len(cls)
    best = 0
    for mask in range(1, 1 << m):
        members = [c for c in range(m) if mask >> c & 1]
        if all(not (succ[c] >> d & 1) and not (succ[d] >> c & 1)
               for c, d in itertools.combinations(members, 2)):
            best = max(best, len(members))
    return best


def depth(frame: KripkeFrame) -> int:
    """Length of the longest chain of clusters."""
    cls, succ = skeleton(frame)
    m = len(cls)
    memo = [0] * m

    def go(c: int) -> int:
        if memo[c] == 0:
            below = [go(d) for d in range(m) if succ[c] >> d & 1]
            memo[c] = 1 + max(below, default=0)
        return memo[c]

    return max((go(c) for c in range(m)), default=0)


def max_cluster(frame: KripkeFrame) -> int:
    return max((len(c) for c in clusters(frame)), default=0)


def has_proper_cluster(frame: KripkeFrame) -> bool:
    return max_cluster(frame) >= 2


def is_rooted(frame: KripkeFrame) -> bool:
    full = (1 << frame.n) - 1
    return any(frame.up_incl(i) == full for i in range(frame.n))


def root_of(frame: KripkeFrame) -> int:
    full = (1 << frame.n) - 1
    for i in range(frame.n):
        if frame.up_incl(i) == full:
            return i
    raise ValueError("frame is not rooted")


def is_poset(frame: KripkeFrame) -> bool:
    """Reflexive and antisymmetric (partial order)."""
    return (all(frame.reflexive(i) for i in range(frame.n))
            and max_cluster(frame) <= 1)


def canonical_form(frame: KripkeFrame) -> tuple[int, tuple[int, ...]]:
    """Minimum adjacency encoding over all point permutations."""
    n = frame.n
    best = None
    for perm in itertools.permutations(range(n)):
        succ = [0] * n
        for i in range(n):
            for j in range(n):
                if frame.sees(i, j):
                    succ[perm[i]] |= 1 << perm[j]
        key = tuple(succ)
        if best is None or key < best:
            best = key
    return n, best


# -- constructions ---------------------------------------------------------

def build_fork(k: int, reflexive: bool = True) -> KripkeFrame:
    """Root seeing k pairwise incomparable leaves (point 0 is the root)."""
    assert k >= 1
    n = k + 1
    succ = [0] * n
    succ[0] = ((1 << n) - 1) if reflexive else ((1 << n) - 2)
    for i in range(1, n):
        succ[i] = (1 << i) if reflexive else 0
    return KripkeFrame(n, tuple(succ))


def build_bt(h: int, reflexive: bool) -> KripkeFrame:
    """Perfect binary tree of height h as a transitive frame; the root
    is point 0 at level 0 and there are 2**(h+1) - 1 points."""
    assert h >= 0
    n = (1 << (h + 1)) - 1
    succ = [0] * n
    for i in range(n):
        for c in (2 * i + 1, 2 * i + 2):
            if c < n:
                succ[i] |= 1 << c
    succ = list(transitive_closure(n, succ))
    if reflexive:
        for i in range(n):
            succ[i] |= 1 << i
    return KripkeFrame(n, tuple(succ))


def add_root(frame: KripkeFrame, reflexive: bool) -> KripkeFrame:
    """New point below everything (the extension-rule frame construction)."""
    n = frame.n + 1
    succ = [s << 1 for s in frame.succ]
    root = ((1 << n) - 2) | (1 if reflexive else 0)
    return KripkeFrame(n, tuple([root] + succ))


def disjoint_sum(frames: list[KripkeFrame]) -> KripkeFrame:
    offset = 0
    succ: list[int] = []
    for f in frames:
        succ.extend(s << offset for s in f.succ)
        offset += f.n
    return KripkeFrame(offset, tuple(succ))


# -- enumeration up to isomorphism ----------------------------------------

@lru_cache(maxsize=None)
def _strict_posets(m: int) -> tuple[tuple[tuple[int, ...], tuple[tuple[int, ...], ...]], ...]:
    """Nonisomorphic strict posets on m elements, each with its
    automorphism group: tuples (succ_masks, autos)."""
    if m == 0:
        return (((), ((),)),)
    seen: dict[tuple[int, ...], None] = {}
    upper = [(i, j) for i in range(m) for j in range(i + 1, m)]
    out = []
    for bits in range(1 << len(upper)):
        succ = [0] * m
        for b, (i, j) in enumerate(upper):
            if bits >> b & 1:
                succ[i] |= 1 << j
        ok = True
        for i in range(m):
            rest, j = succ[i], 0
            while rest and ok:
                if rest & 1 and succ[j] & ~succ[i]:
                    ok = False
                rest >>= 1
                j += 1
            if not ok:
                break
        if not ok:
            continue
        canon = None
        autos = []
        for perm in itertools.permutations(range(m)):
            img = [0] * m
            for i in range(m):
                for j in range(m):
                    if succ[i] >> j & 1:
                        img[perm[i]] |= 1 << perm[j]
            key = tuple(img)
            if key == tuple(succ):
                autos.append(perm)
            if canon is None or key < canon:
                canon = key
        if canon in seen:
            continue
        if canon == tuple(succ):
            seen[canon] = None
            out.append((tuple(succ), tuple(autos)))
        else:
            # canonical representative will be met at its own iteration
            seen[canon] = None
            canon_autos = []
            for perm in itertools.permutations(range(m)):
                img = [0] * m
                for i in range(m):
                    for j in range(m):
                        if canon[i] >> j & 1:
                            img[perm[i]] |= 1 << perm[j]
                if tuple(img) == canon:
                    canon_autos.append(perm)
            out.append((canon, tuple(canon_autos)))
    return tuple(out)


def _compositions(n: int, parts: int):
    """All tuples of `parts` positive ints summing to n."""
    if parts == 0:
        if n == 0:
            yield ()
        return
    for first in range(1, n - parts + 2):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def enumerate_frames(n: int, rooted: bool = False) -> list[KripkeFrame]:
    """All transitive frames on exactly n points, up to isomorphism.

    A transitive frame is a strict poset of clusters with per-cluster
    sizes, where singleton clusters may be reflexive or irreflexive and
    larger clusters are necessarily reflexive.  Assignments are
    deduplicated by poset automorphisms.
    """
    assert n >= 1
    out: list[KripkeFrame] = []
    for m in range(1, n + 1):
        for succ, autos in _strict_posets(m):
            if rooted:
                # need a unique minimal element (the root cluster)
                minimal = [c for c in range(m)
                           if not any(succ[d] >> c & 1 for d in range(m))]
                if len(minimal) != 1:
                    continue
            seen_types: set[tuple] = set()
            for sizes in _compositions(n, m):
                refl_choices = [(True,) if sizes[c] >= 2 else (False, True)
                                for c in range(m)]
                for refl in itertools.product(*refl_choices):
                    types = tuple(zip(sizes, refl))
                    canon = min(tuple(types[p.index(c)] for c in range(m))
                                for p in autos)
                    if canon in seen_types:
                        continue
                    seen_types.add(canon)
                    out.append(_realize(m, succ, sizes, refl))
    return out


def _realize(m: int, succ: tuple[int, ...], sizes, refl) -> KripkeFrame:
    starts = []
    total = 0
    for c in range(m):
        starts.append(total)
        total += sizes[c]
    masks = [0] * total
    cluster_mask = []
    for c in range(m):
        cm = 0
        for x in range(starts[c], starts[c] + sizes[c]):
            cm |= 1 << x
        cluster_mask.append(cm)
    for c in range(m):
        internal = cluster_mask[c] if (sizes[c] >= 2 or refl[c]) else 0
        above = 0
        for d in range(m):
            if succ[c] >> d & 1:
                above |= cluster_mask[d]
        for x in range(starts[c], starts[c] + sizes[c]):
            mask = internal | above
            if sizes[c] >= 2 and not refl[c]:
                mask &= ~(1 << x)
            masks[x] = mask
    return KripkeFrame(total, tuple(masks))


def enumerate_frames_upto(max_n: int, rooted: bool = False) -> list[KripkeFrame]:
    out = []
    for n in range(1, max_n + 1):
        out.extend(enumerate_frames(n, rooted))
    return out


def enumerate_trees(n: int, max_branching: int | None = None,
                    reflexive: bool = True) -> list[KripkeFrame]:
    """Rooted trees on n points up to isomorphism (as transitive
    frames), optionally with a bound on children per node."""
    def gen(total: int):
        # canonical rooted trees as nested sorted tuples
        if total == 1:
            yield ()
        else:
            for parts in _partitions(total - 1, max_branching):
                for combo in _forests(parts):
                    yield combo

    def _partitions(n_: int, maxparts, largest=None):
        if n_ == 0:
            yield ()
            return
        if maxparts == 0:
            return
        top = min(n_, largest if largest is not None else n_)
        for first in range(top, 0, -1):
            nxt = None if maxparts is None else maxparts - 1
            for rest in _partitions(n_ - first, nxt, first):
                yield (first,) + rest

    def _forests(parts):
        if not parts:
            yield ()
            return
        groups: list[tuple[int, int]] = []
        for p in parts:
            if groups and groups[-1][0] == p:
                groups[-1] = (p, groups[-1][1] + 1)
            else:
                groups.append((p, 1))
        pools = []
        for size, count in groups:
            subtrees = sorted(set(gen(size)))
            pools.append(list(itertools.combinations_with_replacement(subtrees, count)))
        for chosen in itertools.product(*pools):
            merged = tuple(t for group in chosen for t in group)
            yield merged

    out = []
    for shape in sorted(set(gen(n))):
        out.append(_tree_to_frame(shape, reflexive))
    return out


def _tree_to_frame(shape, reflexive: bool) -> KripkeFrame:
    edges: list[tuple[int, int]] = []
    counter = [0]

    def build(node) -> int:
        me = counter[0]
        counter[0] += 1
        for child in node:
            c = build(child)
            edges.append((me, c))
        return me

    build(shape)
    n = counter[0]
    succ = [0] * n
    for i, j in edges:
        succ[i] |= 1 << j
    succ = list(transitive_closure(n, succ))
    if reflexive:
        for i in range(n):
            succ[i] |= 1 << i
    return KripkeFrame(n, tuple(succ))


# -- subreduction search ---------------------------------------------------

def find_dense_weak_subreduction(frame: KripkeFrame, target: KripkeFrame,
                                 weak: bool = True,
                                 budget: int = 10) -> dict[int, int] | None:
    """Exhaustive search for a dense (weak) partial onto map satisfying
    the back-and-forth conditions; returns {point: image} or None.

    The admissible-set condition is vacuous for full powerset frames.
    """
    n, m = frame.n, target.n
    if n > budget:
        raise ValueError(f"frame has {n} points, budget is {budget}")

    t_strict = [target.succ[c] & ~(1 << c) for c in range(m)]

    def le_t(a: int, b: int) -> bool:
        return a == b or bool(target.succ[a] >> b & 1)

    assignment: list[int] = [-1] * n  # -1 undefined, else target point

    def consistent(i: int, v: int) -> bool:
        for j in range(i):
            w = assignment[j]
            if w < 0:
                continue
            if frame.sees(j, i):
                if weak:
                    if not le_t(w, v):
                        return False
                elif not (target.succ[w] >> v & 1):
                    return False
            if frame.sees(i, j):
                if weak:
                    if not le_t(v, w):
                        return False
                elif not (target.succ[v] >> w & 1):
                    return False
        return True

    def full_check() -> bool:
        dom = [i for i in range(n) if assignment[i] >= 0]
        if sorted(set(assignment[i] for i in dom)) != list(range(m)):
            return False
        # (S2)/(S2'): every target successor is hit above
        for i in dom:
            v = assignment[i]
            rest, u = t_strict[v], 0
            while rest:
                if rest & 1:
                    above = frame.up_incl(i) if weak else frame.succ[i]
                    ok = False
                    bits, y = above, 0
                    while bits:
                        if bits & 1 and assignment[y] == u:
                            ok = True
                            break
                        bits >>= 1
                        y += 1
                    if not ok:
                        return False
                rest >>= 1
                u += 1
        # density: x < y < z with x, z defined forces y defined
        for y in range(n):
            if assignment[y] >= 0:
                continue
            below = any(assignment[x] >= 0 and frame.sees(x, y)
                        for x in range(n))
            abov = any(assignment[z] >= 0 and frame.sees(y, z)
                       for z in range(n))
            if below and abov:
                return False
        return True

    def search(i: int):
        if i == n:
            return full_check()
        for v in range(-1, m):
            assignment[i] = v
            if v < 0 or consistent(i, v):
                if search(i + 1):
                    return True
        assignment[i] = -1
        return False

    if search(0):
        return {i: assignment[i] for i in range(n) if assignment[i] >= 0}
    return None
