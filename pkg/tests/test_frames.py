"""Frame structure, measures, enumeration, and subreduction search."""

import itertools

import pytest

from bbkit.frames import (KripkeFrame, add_root, branching, build_bt,
                          build_fork, canonical_form, clusters, depth,
                          disjoint_sum, enumerate_frames,
                          enumerate_frames_upto, enumerate_trees,
                          find_dense_weak_subreduction, frame_from_pairs,
                          is_poset, is_rooted, max_cluster,
                          transitive_closure, width)


def brute_force_transitive(n):
    """All transitive relations on n labelled points (reference)."""
    out = []
    pairs = [(i, j) for i in range(n) for j in range(n)]
    for bits in range(1 << (n * n)):
        succ = [0] * n
        for b, (i, j) in enumerate(pairs):
            if bits >> b & 1:
                succ[i] |= 1 << j
        ok = True
        for i in range(n):
            rest, j = succ[i], 0
            while rest and ok:
                if rest & 1 and succ[j] & ~succ[i]:
                    ok = False
                rest >>= 1
                j += 1
            if not ok:
                break
        if ok:
            out.append(KripkeFrame(n, tuple(succ)))
    return out


@pytest.mark.parametrize("n", [1, 2, 3])
def test_enumeration_matches_brute_force(n):
    brute = {canonical_form(f) for f in brute_force_transitive(n)}
    fancy = {canonical_form(f) for f in enumerate_frames(n)}
    assert fancy == brute


def test_enumeration_count_n4():
    # also pins the sequence so regressions are loud
    brute = {canonical_form(f) for f in brute_force_transitive(4)}
    fancy = [canonical_form(f) for f in enumerate_frames(4)]
    assert len(fancy) == len(set(fancy))
    assert set(fancy) == brute


def test_rooted_filter():
    for f in enumerate_frames(3, rooted=True):
        assert is_rooted(f)
    all3 = enumerate_frames(3)
    rooted3 = enumerate_frames(3, rooted=True)
    assert len(rooted3) < len(all3)


def test_fork_measures():
    fork = build_fork(2, reflexive=True)
    assert branching(fork) == 2
    assert width(fork) == 2
    assert depth(fork) == 2
    assert max_cluster(fork) == 1
    bt = build_bt(2, reflexive=False)
    assert branching(bt) == 2
    assert width(bt) == 4
    single = frame_from_pairs(2, [(0, 1), (1, 0)], reflexive=[0, 1])
    assert branching(single) == 0
    assert depth(single) == 1
    assert max_cluster(single) == 2


def test_build_bt_smallest():
    assert build_bt(0, reflexive=False).n == 1
    assert not build_bt(0, reflexive=False).reflexive(0)
    bt1 = build_bt(1, reflexive=True)
    fork = build_fork(2, reflexive=True)
    assert canonical_form(bt1) == canonical_form(fork)


def test_subreduction_identity_and_fork():
    fork3 = build_fork(3, reflexive=True)
    found = find_dense_weak_subreduction(fork3, fork3)
    assert found is not None
    bt = build_bt(2, reflexive=True)
    assert find_dense_weak_subreduction(bt, fork3) is None
    rooted = add_root(fork3, reflexive=True)
    assert find_dense_weak_subreduction(rooted, fork3) is not None


def test_subreduction_respects_conditions():
    fork = build_fork(2, reflexive=True)
    chain = frame_from_pairs(3, [(0, 1), (0, 2), (1, 2)],
                             reflexive=[0, 1, 2])
    # a 3-chain has branching 1: no map onto the 2-fork
    assert find_dense_weak_subreduction(chain, fork) is None


def test_trees():
    trees = enumerate_trees(3, None, True)
    assert len(trees) == 2  # chain and fork
    for t in trees:
        assert is_poset(t)
        assert is_rooted(t)
    bounded = enumerate_trees(4, 1, True)
    assert len(bounded) == 1  # only the chain when branching is 1


def test_tree_branching_matches_subreduction():
    # bounded branching in the tree sense == no dense weak map to the fork
    for n in range(1, 6):
        for t in enumerate_trees(n, None, True):
            has_map = find_dense_weak_subreduction(t, build_fork(3, True))
            assert (branching(t) >= 3) == (has_map is not None)


def test_disjoint_sum_and_root():
    a = build_fork(2, True)
    b = build_bt(1, False)
    s = disjoint_sum([a, b])
    assert s.n == a.n + b.n
    assert not is_rooted(s)
    r = add_root(s, reflexive=False)
    assert is_rooted(r)
    assert not r.reflexive(0)
