"""Quick check of the Python bindings. Build first with
`maturin develop --release -m crates/python/Cargo.toml`."""

import math

import windowgap as wg


def main():
    g = wg.Geometry.symmetric_pair(1.0, 0.3)
    print(g, "threshold", g.threshold)

    r = wg.solve_ground_state(g, tol=1e-8)
    assert r is not None
    assert (math.pi / 2) ** 2 < r["E"] < math.pi ** 2
    assert r["gap"] > 0
    print("mode matching E =", r["E"], "gap =", r["gap"], "modes", r["n_modes"])

    half = wg.solve_ground_state(wg.Geometry.half_strip(1.0, 0.3), tol=1e-8)
    assert abs(half["E"] - r["E"]) < 1e-7

    fd = wg.fd_ground_state(g, h=1 / 80)
    assert abs(fd["energy"] - r["E"]) / r["E"] < 1e-3
    print("finite differences E =", fd["energy"])

    ub = wg.optimize_trial(g.with_window(0.1))
    assert ub["value"] < 0
    print("trial bound", ub["value"])

    chain = wg.build_chain(1.0, 0.16)
    assert chain["C"] == wg.gamma_constant(1.0)
    print("chain c1 =", chain["c1"], "a_star =", chain["a_star"])

    assert abs(wg.overlap(1.0, 1.0) - 8 / (3 * math.pi)) < 1e-12

    s = wg.sweep(wg.Geometry.half_strip(1.0, 0.1), [0.05, 0.1, 0.2])
    assert len(s["rows"]) == 3 and all(row["gap"] > 0 for row in s["rows"])
    print("sweep fit", s["fit"])

    l3 = wg.lemma3_gap(1.0, 256)
    assert l3["epsilon2"] > 0
    l4 = wg.lemma4_constant(math.pi / 8, 1.0, 0.05)
    assert l4["numeric"] >= l4["closed_form"]

    try:
        wg.Geometry(1.0, 1.0, 2.0)
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("wide window accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
