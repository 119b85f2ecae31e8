import pytest

import teamlog

TWO = {"domain": 2}
BOTH = {"vars": ["x"], "rows": [[0], [1]]}


def test_worked_example_eval():
    assert teamlog.evaluate(TWO, BOTH, "A y (inc(y ; x))")["value"] is True
    assert teamlog.evaluate(TWO, BOTH, "dep( ; x)")["value"] is False


def test_worked_example_sat():
    gamma = ["A y (inc(y ; x))", "E y E z (y != z)"]
    found = teamlog.sat(gamma, max_n=3)
    assert found["satisfiable"]
    assert found["structure"]["domain"] == 2
    assert found["team"]["rows"] == [[0], [1]]
    assert not teamlog.sat(gamma + ["dep( ; x)"], max_n=3)["satisfiable"]


def test_strict_rewrite():
    assert teamlog.format_formula("x = x v x = x", strict=True) == "x = x vs x = x"


def test_translation_agrees():
    m = {"domain": 2, "relations": {"P": [[0]]}, "arities": {"P": 1}}
    x = {"vars": ["x", "y"], "rows": [[0, 1], [1, 1]]}
    out = teamlog.crosscheck(m, x, "dep(x ; y) v P(x)")
    assert out["agree"]
    assert teamlog.translate("dep(x ; y)")["sentence"].startswith("A x A y A x' A y'")


def test_merge_of_an_incoherent_triangle():
    system = {
        "vars": ["x0", "x1", "x2"],
        "domain": 2,
        "family": [
            {"index": [], "tuples": [[]]},
            {"index": [0], "tuples": [[0], [1]]},
            {"index": [1], "tuples": [[0], [1]]},
            {"index": [2], "tuples": [[0], [1]]},
            {"index": [0, 1], "tuples": [[0, 0], [1, 1]]},
            {"index": [1, 2], "tuples": [[0, 0], [1, 1]]},
            {"index": [0, 2], "tuples": [[0, 1], [1, 0]]},
        ],
    }
    out = teamlog.merge(system)
    assert out["verified"] is False
    assert out["team"] is None
    assert out["failure"] == []


def test_suite_runner():
    assert "merge" in teamlog.suite_names()
    report = teamlog.run_suite("merge", seed=3)
    assert report["pass"] is True
    assert report["seed"] == 3


def test_errors_carry_a_kind():
    with pytest.raises(teamlog.TeamlogError) as info:
        teamlog.evaluate(TWO, BOTH, "inc(x ;")
    assert info.value.args[0] == "parse"
    with pytest.raises(teamlog.TeamlogError) as info:
        teamlog.evaluate(TWO, {"vars": ["x"], "rows": [[5]]}, "x = x")
    assert info.value.args[0] == "validation"


def test_cli_in_process():
    code, report = teamlog.cli("sat", "-f", "dep( ; x)", "-f", "A y (inc(y ; x))",
                               "-f", "E y E z (y != z)", "--max-n", "3")
    assert code == 1
    assert report["satisfiable"] is False
