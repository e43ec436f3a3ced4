"""Split plans: frozen small examples, feasibility errors, and invariants."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitfun import ConfigError, MAX_ORDER, SplitPlan, anchor_size, make_split, validate_plan


# ---------------------------------------------------------------- anchor sizes

def test_anchor_size_frozen():
    # balanced: ceil(n/2)
    assert anchor_size(10, "balanced") == 5
    assert anchor_size(11, "balanced") == 6
    # efficient: ceil(n / max(ln n, 2)); ln 100 = 4.6052 -> ceil(21.71) = 22
    assert anchor_size(100, "efficient") == 22
    # small n: ln n < 2, denominator clamps at 2
    assert anchor_size(4, "efficient") == 2
    # ln 4096 = 8.3178 -> ceil(492.44) = 493
    assert anchor_size(4096, "efficient") == 493


# ---------------------------------------------------------------- frozen plan

def test_make_split_frozen_n10_m2():
    plan = make_split(10, 2, "balanced")
    assert plan.j0 == (0, 1, 2, 3, 4)
    # level 1: the whole complement in one block
    assert plan.parts[0] == ((5, 6, 7, 8, 9),)
    # level 2: near-equal blocks, larger first: sizes 3, 2
    assert plan.parts[1] == ((5, 6, 7), (8, 9))


def test_make_split_frozen_n9_m3():
    plan = make_split(9, 3, "balanced")
    # anchor ceil(9/2) = 5, complement {5,...,8}
    assert plan.j0 == (0, 1, 2, 3, 4)
    assert plan.parts[0] == ((5, 6, 7, 8),)
    assert plan.parts[1] == ((5, 6), (7, 8))
    # level 3 splits 4 indices into sizes 2,1,1
    assert plan.parts[2] == ((5, 6), (7,), (8,))


def test_make_split_efficient_anchor():
    plan = make_split(100, 2, "efficient")
    assert len(plan.j0) == 22
    assert plan.j0 == tuple(range(22))


# ---------------------------------------------------------------- errors

def test_make_split_rejects_infeasible_n():
    with pytest.raises(ConfigError):
        make_split(3, 3)  # needs n >= m+1 = 4
    # n = 5, m = 3 balanced: complement has 2 < 3 indices; smallest feasible
    # n is 6 (anchor 3, complement 3) and the error says so
    with pytest.raises(ConfigError, match="smallest feasible n is 6"):
        make_split(5, 3)
    make_split(6, 3)  # feasible


def test_make_split_rejects_bad_m_and_mode():
    with pytest.raises(ConfigError):
        make_split(10, 0)
    with pytest.raises(ConfigError):
        make_split(10000, MAX_ORDER + 1)
    with pytest.raises(ConfigError):
        make_split(10, 2, mode="fancy")
    with pytest.raises(ConfigError):
        make_split(10.5, 2)


# ---------------------------------------------------------------- shuffling

def test_shuffle_is_deterministic_per_seed():
    a = make_split(40, 3, seed=7, shuffle=True)
    b = make_split(40, 3, seed=7, shuffle=True)
    c = make_split(40, 3, seed=8, shuffle=True)
    assert a == b
    assert a != c
    assert validate_plan(a) is None
    # a shuffled anchor is (almost surely) not the identity prefix
    assert a.j0 != tuple(range(len(a.j0)))


def test_unshuffled_plan_is_contiguous():
    plan = make_split(40, 3)
    assert plan.j0 == tuple(range(20))
    flat = [i for b in plan.parts[2] for i in b]
    assert flat == list(range(20, 40))


# ---------------------------------------------------------------- invariants

@settings(max_examples=300, deadline=None)
@given(
    n=st.integers(2, 300),
    m=st.integers(1, 6),
    mode=st.sampled_from(["balanced", "efficient"]),
    shuffle=st.booleans(),
)
def test_every_feasible_plan_validates(n, m, mode, shuffle):
    try:
        plan = make_split(n, m, mode, seed=n * 31 + m, shuffle=shuffle)
    except ConfigError:
        # infeasible combination; nothing to check
        return
    assert validate_plan(plan) is None
    assert len(plan.j0) == anchor_size(n, mode)
    # level sizes: each level's blocks partition the complement
    c = n - len(plan.j0)
    for k, blocks in enumerate(plan.parts, start=1):
        assert sum(len(b) for b in blocks) == c
        assert len(blocks) == k
        assert max(len(b) for b in blocks) - min(len(b) for b in blocks) <= 1
        # larger blocks come first
        sizes = [len(b) for b in blocks]
        assert sizes == sorted(sizes, reverse=True)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(4, 400), m=st.integers(1, 4))
def test_efficient_anchor_matches_formula(n, m):
    try:
        plan = make_split(n, m, "efficient")
    except ConfigError:
        return
    assert len(plan.j0) == max(1, math.ceil(n / max(math.log(n), 2.0)))


# ---------------------------------------------------------------- validator

def _good():
    return make_split(12, 2)


def test_validate_plan_catches_tampering():
    g = _good()
    # duplicated index across blocks of one level
    bad = SplitPlan(n=g.n, m=g.m, j0=g.j0,
                    parts=(g.parts[0], ((6, 7, 8), (8, 9, 10, 11))))
    assert "disjoint" in validate_plan(bad)
    # block overlapping the anchor
    bad = SplitPlan(n=g.n, m=g.m, j0=g.j0,
                    parts=(g.parts[0], ((0, 6, 7), (8, 9, 10, 11))))
    assert "anchor" in validate_plan(bad)
    # wrong number of blocks at a level
    bad = SplitPlan(n=g.n, m=g.m, j0=g.j0, parts=(g.parts[0], (g.parts[0][0],)))
    assert "blocks" in validate_plan(bad)
    # sizes differing by more than one
    bad = SplitPlan(n=g.n, m=g.m, j0=g.j0,
                    parts=(g.parts[0], ((6,), (7, 8, 9, 10, 11))))
    assert "more than one" in validate_plan(bad)
    # missing coverage
    bad = SplitPlan(n=g.n, m=g.m, j0=g.j0,
                    parts=(((6, 7, 8, 9, 10),), g.parts[1]))
    assert "cover" in validate_plan(bad)
    # wrong level count
    bad = SplitPlan(n=g.n, m=g.m, j0=g.j0, parts=(g.parts[0],))
    assert "levels" in validate_plan(bad)
    # unsorted block
    bad = SplitPlan(n=g.n, m=g.m, j0=g.j0,
                    parts=(g.parts[0], ((7, 6, 8), (9, 10, 11))))
    assert "unsorted" in validate_plan(bad)
    # empty anchor
    bad = SplitPlan(n=g.n, m=g.m, j0=(), parts=g.parts)
    assert "empty" in validate_plan(bad)
