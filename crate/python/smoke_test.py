"""Smoke test for the pynbval extension module.

Build first with `pip install --no-build-isolation -e crates/python`.
"""

from pathlib import Path

import pynbval

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

GAUSSIAN = """
[field]
characteristic = "zero"
prime = 2

[extension]
layers = [{ kind = "kummer", datum = "-1" }]
"""


def main():
    lab = pynbval.Lab(GAUSSIAN)
    assert (lab.p, lab.n, lab.degree) == (2, 1, 2)
    assert lab.lower_breaks == [1]
    assert lab.hypothesis_ok

    # Valuations in the class of b_m give generators; x itself has trace zero.
    sweep = lab.nbtest(valuation=-3, trials=10, seed=1)
    assert sweep["verdict"] == "pass"
    assert sweep["payload"]["sweep"]["report"]["generator"] == 10
    x = lab.nb_test_monomial([1])
    assert x["verdict"]["status"] == "non_generator"

    pair = pynbval.Lab.from_file(SCENARIOS / "as_breaks_1_5.toml")
    assert pair.lower_breaks == [1, 5]
    assert pair.upper_breaks == [(1, 1), (3, 1)]
    assert pair.t_g == 7
    cert = pair.rhov(2)["payload"]["certificate"]
    assert cert["checks"]["trace_zero_exact"] and cert["verdict"]["status"] == "non_generator"
    assert pair.verify("hasse-arf")["verdict"] == "pass"

    sqrt2 = pynbval.Lab.from_file(SCENARIOS / "sqrt2.toml")
    assert not sqrt2.hypothesis_ok
    assert sqrt2.ramify()["verdict"] == "pass"

    try:
        lab.rhov(5)
    except pynbval.InvalidInputError:
        pass
    else:
        raise AssertionError("rhov in the normal basis class must be rejected")
    try:
        pynbval.Lab(GAUSSIAN.replace("prime = 2", "prime = 4"))
    except pynbval.NbvalError:
        pass
    else:
        raise AssertionError("composite prime must be rejected")

    print("pynbval smoke test passed:", lab, pair)


if __name__ == "__main__":
    main()
