import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergecycles.core import ColoredHypergraph, Params, random_coloring, rank_subset
from bergecycles.hamilton import (
    DegreeSequence,
    SimpleGraph,
    bondy_chvatal_closure,
    chvatal_holds,
    find_hamiltonian_cycle,
    find_mono_ham_tight_cycle,
    good_pair_graph,
)
from bergecycles.shadow import build_shadow


def cycle_graph(n):
    return SimpleGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def petersen():
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    return SimpleGraph.from_edges(10, edges)


def is_cycle_of(g, cycle):
    n = g.n
    return (sorted(cycle) == list(range(n))
            and all(g.has_edge(cycle[i], cycle[(i + 1) % n]) for i in range(n)))


def hamiltonian_oracle(g):
    """Permutation brute force (first vertex pinned, reflection halved)."""
    n = g.n
    for perm in itertools.permutations(range(1, n)):
        if perm[0] > perm[-1]:
            continue
        cyc = (0,) + perm
        if all(g.has_edge(cyc[i], cyc[(i + 1) % n]) for i in range(n)):
            return True
    return False


def test_chvatal_reference_values():
    assert chvatal_holds((3, 3, 3, 3)) is True           # K_4
    assert chvatal_holds((2, 2, 2, 2, 2)) is False       # C_5: sufficient, not necessary
    assert chvatal_holds((1, 1, 2)) is False             # path on 3 vertices
    assert chvatal_holds(DegreeSequence.from_graph(SimpleGraph.complete(6)))
    with pytest.raises(ValueError):
        chvatal_holds((1, 1))


def test_chvatal_unsorted_input_is_sorted():
    assert chvatal_holds([3, 3, 3, 3]) == chvatal_holds([3, 3, 3, 3][::-1])


def test_find_on_complete_graph():
    res = find_hamiltonian_cycle(SimpleGraph.complete(5))
    assert res.status == "found" and is_cycle_of(SimpleGraph.complete(5), res.cycle)


def test_find_on_cycle_graph():
    g = cycle_graph(6)
    res = find_hamiltonian_cycle(g)
    assert res.status == "found" and is_cycle_of(g, res.cycle)


def test_petersen_is_not_hamiltonian():
    res = find_hamiltonian_cycle(petersen())
    assert res.status == "none"


def test_low_degree_and_disconnection_shortcut():
    g = SimpleGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])  # path: degree-1 ends
    assert find_hamiltonian_cycle(g).status == "none"
    g2 = SimpleGraph.from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    assert find_hamiltonian_cycle(g2).status == "none"


def test_budget_exhaustion_reported():
    # sparse non-Hamiltonian graph, absurdly small budget: must say budget, not none
    g = petersen()
    res = find_hamiltonian_cycle(g, budget=3)
    assert res.status == "budget"


def test_budget_monotonicity_on_petersen():
    # statuses along growing budgets: budget* then none forever
    statuses = [find_hamiltonian_cycle(petersen(), budget=b).status
                for b in (1, 10, 100, 10**6)]
    assert "found" not in statuses
    tail = statuses[statuses.index("none"):] if "none" in statuses else []
    assert all(s == "none" for s in tail)


def test_closure_adds_nothing_below_threshold():
    g = cycle_graph(8)
    rows, added = bondy_chvatal_closure(g)
    assert added == [] and rows == g.rows


def test_closure_route_on_dense_graph():
    # complete graph minus a perfect matching: degrees n-2, closure completes
    n = 10
    g = SimpleGraph.complete(n)
    for v in range(0, n, 2):
        g.rows[v] &= ~(1 << (v + 1))
        g.rows[v + 1] &= ~(1 << v)
    assert chvatal_holds(DegreeSequence.from_graph(g))
    res = find_hamiltonian_cycle(g)
    assert res.status == "found" and is_cycle_of(g, res.cycle)
    assert res.expansions == 0  # never reached the backtracker


def _graph_from_mask(n, mask):
    g = SimpleGraph.empty(n)
    k = 0
    for u in range(n):
        for v in range(u + 1, n):
            if mask >> k & 1:
                g.add_edge(u, v)
            k += 1
    return g


@given(st.integers(0, 2**15 - 1))
@settings(max_examples=150, deadline=None)
def test_search_agrees_with_permutation_oracle_n6(mask):
    g = _graph_from_mask(6, mask)
    res = find_hamiltonian_cycle(g)
    assert res.status in ("found", "none")
    assert (res.status == "found") == hamiltonian_oracle(g)
    if res.cycle is not None:
        assert is_cycle_of(g, res.cycle)


@given(st.integers(0, 2**21 - 1))
@settings(max_examples=60, deadline=None)
def test_chvatal_implies_found_n7(mask):
    g = _graph_from_mask(7, mask)
    degs = DegreeSequence.from_graph(g)
    if chvatal_holds(degs):
        res = find_hamiltonian_cycle(g)
        assert res.status == "found" and is_cycle_of(g, res.cycle)


def test_determinism():
    g = _graph_from_mask(8, 0b1011011101101011001101011011)
    r1 = find_hamiltonian_cycle(g)
    r2 = find_hamiltonian_cycle(g)
    assert r1 == r2


def test_good_pair_graph_mono():
    p = Params(n=5, r=3, t=2, c=2)
    h = ColoredHypergraph(p, np.ones(p.num_edges, dtype=np.uint8))
    s = build_shadow(h, 2)
    assert good_pair_graph(s, 1).degrees() == [4] * 5
    assert good_pair_graph(s, 2).degrees() == [0] * 5

    found = find_mono_ham_tight_cycle(s, 2, 1)
    assert found.status == "found"
    assert sorted(found.witness.core) == list(range(5))

    assert find_mono_ham_tight_cycle(s, 2, 2).status == "none"


def test_tight_cycle_t3_single_color():
    # threshold r-t+1 = 1: every triple is good; any cyclic order works
    p = Params(n=6, r=3, t=2, c=1)
    h = ColoredHypergraph(p, np.ones(p.num_edges, dtype=np.uint8))
    s = build_shadow(h, 3)
    res = find_mono_ham_tight_cycle(s, 3, 1)
    assert res.status == "found"
    w = res.witness
    assert w.core[0] == 0 and w.core[1] < w.core[-1]
    # every consecutive window is good per the shadow itself
    for i in range(6):
        win = tuple(sorted(w.core[(i + j) % 6] for j in range(3)))
        assert s.is_good(rank_subset(win), 1)


def test_tight_cycle_t3_respects_bad_windows():
    # color away triples through {0,1,2}-ish windows and confirm soundness
    p = Params(n=7, r=4, t=2, c=2)
    h = random_coloring(p, seed=13)
    s = build_shadow(h, 3)
    for color in (1, 2):
        res = find_mono_ham_tight_cycle(s, 3, color, budget=10**6)
        if res.status == "found":
            w = res.witness
            for i in range(7):
                win = tuple(sorted(w.core[(i + j) % 7] for j in range(3)))
                assert s.is_good(rank_subset(win), color)


def test_tight_cycle_budget_report():
    p = Params(n=8, r=4, t=2, c=2)
    h = random_coloring(p, seed=3)
    s = build_shadow(h, 3)
    res = find_mono_ham_tight_cycle(s, 3, 1, budget=2)
    assert res.status in ("budget", "found", "none")
    if res.status == "budget":
        assert res.witness is None
