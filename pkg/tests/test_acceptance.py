"""End-to-end acceptance checks at their stated sizes and tolerances.

Each test prints one PASS/FAIL line (visible with ``pytest -s`` or ``-rA``).
"""
import pytest

from logrank_incidence import acceptance


def check(result):
    print(result.line())
    failing = [r for r in result.rows if not r.get("ok", True)]
    assert result.passed, f"{result.line()}; failing rows: {failing[:3]}"


def test_criterion_1_lattice_incidence_count():
    check(acceptance.criterion_1())


def test_criterion_2_lattice_subgraph_bounds():
    check(acceptance.criterion_2())


def test_criterion_3_dense_subset():
    check(acceptance.criterion_3())


def test_criterion_4_sampler_rate():
    check(acceptance.criterion_4())


def test_criterion_5_reduction_pipeline():
    check(acceptance.criterion_5())


def test_criterion_6_poly_rank_certificates():
    check(acceptance.criterion_6())


def test_criterion_7_grid_family():
    check(acceptance.criterion_7())


def test_criterion_8_frankl_rodl():
    check(acceptance.criterion_8())


def test_criterion_9_protocols():
    check(acceptance.criterion_9())


def test_reproduce_all_small_dims_is_deterministic():
    a = acceptance.run_criteria("all", max_d=5)
    b = acceptance.run_criteria("all", max_d=5)
    assert all(r.passed for r in a)
    assert [r.rows for r in a] == [r.rows for r in b]
