from __future__ import annotations

import logging
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import valency3_graphs
from skeleta.covering import ConstraintRow
from skeleta.errors import GraphError, Inconsistent, RankDeficient
from skeleta.generators import bouquet, dumbbell, k4, random_lengths, theta
from skeleta.graph import Graph, subdivide_edge
from skeleta.reconstruct import (ConstraintSystem, column_rank_bound, constraint_matrix,
                                 dedupe_rows, iter_rows, solve_lengths, verify_prop_a1)


def test_theta_base_rows_have_full_rank():
    system = constraint_matrix(theta(), max_degree=1)
    assert system.matrix() == [[1, 1, 0], [1, 0, 1], [0, 1, 1]]
    rows = [ConstraintRow({"a": 1, "b": 1}, 3), ConstraintRow({"b": 1, "c": 1}, 5),
            ConstraintRow({"a": 1, "c": 1}, 4)]
    assert solve_lengths(ConstraintSystem(rows, "abc")) == {"a": 1, "b": 2, "c": 3}


def test_dumbbell_needs_the_girth_row():
    base = constraint_matrix(dumbbell(), max_degree=1)
    with pytest.raises(RankDeficient) as info:
        solve_lengths(ConstraintSystem([ConstraintRow(r.coeffs, 1) for r in base.rows], "abc"))
    assert info.value.rank == 2
    girth = ConstraintRow({"a": 1, "b": 2, "c": 1}, 12)
    rows = [ConstraintRow({"a": 1}, 1), ConstraintRow({"c": 1}, 1), girth]
    assert solve_lengths(ConstraintSystem(rows, "abc")) == {"a": 1, "b": 5, "c": 1}
    assert any(dict(r.coeffs) == {"a": 1, "b": 2, "c": 1} for _, r in iter_rows(dumbbell()))


def test_zero_lengths_solve_to_zero():
    rows = [ConstraintRow(r.coeffs, 0) for _, r in iter_rows(k4(), 1)]
    assert set(solve_lengths(ConstraintSystem(rows, k4().sorted_edges())).values()) == {0}


@pytest.mark.parametrize("name,lengths", [
    ("theta", [1, 2, 3]),
    ("dumbbell", [1, 5, 1]),
    ("k4", [1, Fraction(1, 2), 2, 3, Fraction(5, 4), 1]),
])
def test_exact_recovery_on_named_graphs(name, lengths):
    m = {"theta": theta, "dumbbell": dumbbell, "k4": k4}[name](lengths)
    rows = [r for _, r in iter_rows(m)]
    assert solve_lengths(ConstraintSystem(rows, m.graph.sorted_edges())) == dict(m.length)


@settings(max_examples=25, deadline=None)
@given(valency3_graphs(max_edges=7))
def test_random_valency3_graphs_are_recovered(g):
    m = random_lengths(random.Random(len(g.edges)), g, max_denominator=6)
    report = verify_prop_a1(g)
    assert report.holds and report.rank == len(g.edges)
    rows = [r for _, r in iter_rows(m, report.degree_used)]
    assert solve_lengths(ConstraintSystem(rows, g.sorted_edges())) == dict(m.length)


@settings(max_examples=25, deadline=None)
@given(valency3_graphs(max_edges=6))
def test_subdividing_any_edge_breaks_recovery(g):
    for e in g.sorted_edges():
        s = subdivide_edge(g, e)
        report = verify_prop_a1(s, max_degree=2)
        assert not report.holds
        assert report.rank == len(s.edges) - 1
        assert len(report.null_space) == 1
        (v,) = report.null_space
        order = s.sorted_edges()
        assert v[order.index(f"{e}#1")] == -v[order.index(f"{e}#2")] != 0


def test_rank_check_on_named_graphs():
    assert verify_prop_a1(k4()).holds
    assert verify_prop_a1(theta()).holds
    report = verify_prop_a1(subdivide_edge(theta(), "a"))
    assert not report.holds and len(report.null_space) == 1
    assert "full_rank=false" in report.summary()
    assert verify_prop_a1(bouquet(3)).holds


def test_triple_covers_only_when_valency_allows(caplog):
    # a tree-like graph with a valency-1 vertex never reaches full rank
    g = Graph.from_edges([("a", "u", "u"), ("b", "u", "v")])
    with caplog.at_level(logging.WARNING, logger="skeleta.reconstruct"):
        report = verify_prop_a1(g)
    assert not report.holds and report.degree_used <= 2
    assert not caplog.records
    assert column_rank_bound(g) == 1


def test_dedupe_and_inconsistency():
    rows = [ConstraintRow({"a": 1}, 1), ConstraintRow({"a": 1}, 1), ConstraintRow({"b": 1}, 2)]
    assert len(dedupe_rows(rows)) == 2
    with pytest.raises(Inconsistent):
        dedupe_rows([ConstraintRow({"a": 1}, 1), ConstraintRow({"a": 1}, 2)])
    with pytest.raises(Inconsistent):
        solve_lengths(ConstraintSystem([ConstraintRow({"a": 1, "b": 1}, 3), ConstraintRow({"a": 1}, 1),
                                        ConstraintRow({"b": 1}, 1)], "ab"))
    with pytest.raises(GraphError):
        ConstraintSystem([ConstraintRow({"z": 1}, 1)], "ab")
    with pytest.raises(GraphError):
        solve_lengths(ConstraintSystem([ConstraintRow({"a": 1})], "a"))


def test_disconnected_or_cusped_graphs_are_rejected():
    with pytest.raises(GraphError):
        list(iter_rows(Graph.from_edges([("a", "u", "u"), ("b", "v", "v")])))
    with pytest.raises(Exception):
        list(iter_rows(Graph.from_edges([("a", "u", "u")], cusps=[("c", "u")])))
