import math
import os

import pytest

import lhsis

SCENARIOS = os.environ.get(
    "LHSIS_SCENARIOS", os.path.join(os.path.dirname(__file__), "..", "..", "scenarios")
)


def test_expression_printing():
    assert lhsis.parse_expression("1+0.5*sin(t)") == "1 + 0.5*sin(t)"
    with pytest.raises(lhsis.ParseError):
        lhsis.parse_expression("sin t")


def test_coefficients():
    assert lhsis.Coefficient("2*t^3")(2.0) == 16.0
    assert lhsis.Coefficient(3.0)(17.5) == 3.0
    assert lhsis.Coefficient.sinusoidal(1.0, 0.5, 1.0)(0.0) == 1.0
    with pytest.raises(lhsis.DomainError):
        lhsis.Coefficient("ln(t)")(-1.0)


def test_quadrature_accepts_python_callables():
    assert lhsis.integrate(math.exp, 0.0, 1.0) == pytest.approx(math.e - 1.0, abs=1e-10)


def test_chart_maps():
    x, y = lhsis.to_canonical(2.0 / 3.0, 3.0)
    assert (x, y) == pytest.approx((1.0, 2.0))
    assert lhsis.from_canonical(x, y) == pytest.approx((2.0 / 3.0, 3.0))
    with pytest.raises(lhsis.DomainError):
        lhsis.to_canonical(1.0, 1.0)


def test_book_solution_unit_coefficients():
    (x, y), = lhsis.book_solution("1", "1", 0.0, 1.0, 1.0, [1.0])
    assert x == pytest.approx(math.e, abs=1e-12)
    assert y == pytest.approx(1.0, abs=1e-12)


def test_sis_forms_agree():
    times = [0.5, 1.0, 2.0]
    general = lhsis.sis_solution(1.0, 1.0, 0.0, 1.0, 2.0, times)
    for t, (q, p) in zip(times, general):
        qc, pc = lhsis.sis_constant_solution(1.0, 1.0, 2.0, t)
        assert q == pytest.approx(qc, rel=1e-9)
        assert p == pytest.approx(pc, rel=1e-9)


def test_deformed_solutions_and_window():
    assert lhsis.validity_window(1.0, 0.0, 1.0, 0.5, 5.0) == pytest.approx(math.log(2), abs=1e-9)
    assert math.isinf(lhsis.validity_window(1.0, 0.0, -1.0, 0.5, 5.0))
    with pytest.raises(lhsis.DomainError):
        lhsis.deformed_book_solution(1.0, 0.0, 0.0, 1.0, 0.5, 0.0, [1.0])
    (q, p), = lhsis.deformed_sis_solution("1 + 0.5*sin(t)", 1.0, 0.0, 1e-13, 1.0, 2.0, [0.0])
    assert (q, p) == pytest.approx((2.0 / 3.0, 3.0))


def test_run_scenario_file():
    sc = lhsis.load_scenario(os.path.join(SCENARIOS, "seasonal-sis.json"))
    assert sc.model == "sis"
    report = lhsis.run_scenario(sc)
    assert report["status"] == 0
    assert report["max_deviation"] < 1e-6
    assert len(report["samples"]) == 101
    assert report["csv"].startswith("t,q,p,")
    fixed = lhsis.run_scenario(sc, method="fixed")
    assert fixed["max_deviation"] < 1e-6


def test_window_exit_and_bad_input():
    sc = lhsis.load_scenario(os.path.join(SCENARIOS, "window-exit.json"))
    report = lhsis.run_scenario(sc)
    assert report["status"] == 3
    assert report["failing_time"] == pytest.approx(math.log(2), abs=1e-9)
    with pytest.raises(lhsis.ScenarioError):
        lhsis.parse_scenario('{"model": "sir"}')


def test_compare_orders():
    sc = lhsis.load_scenario(os.path.join(SCENARIOS, "deformed-book.json"))
    rows = lhsis.compare_scenario(sc, [1e-2, 5e-3, 2.5e-3])
    assert len(rows) == 3
    assert 1.8 <= rows[2]["first_order_order"] <= 2.2


def test_invariants():
    results = lhsis.run_invariants(seed=0, count=50)
    assert all(r["passed"] for r in results), results
