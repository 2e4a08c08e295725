import math
import os
from pathlib import Path

import numpy as np
import pytest

import ssocert

FIXTURES = Path(os.environ.get("SSOCERT_FIXTURES", Path(__file__).resolve().parents[2] / "fixtures"))


def test_prox_examples():
    g = ssocert.Function.psd_indicator(3)
    np.testing.assert_allclose(ssocert.prox(g, 1.0, np.diag([2.0, 0.0, -3.0])), np.diag([2.0, 0.0, 0.0]))
    n = ssocert.Function.nuclear_norm(2, 2)
    np.testing.assert_allclose(ssocert.prox(n, 1.0, np.diag([3.0, 0.5])), np.diag([2.0, 0.0]), atol=1e-14)
    np.testing.assert_allclose(ssocert.prox_conjugate(n, 1.0, np.diag([3.0, 0.5])), np.diag([1.0, 0.5]), atol=1e-14)


def test_prox_matches_numpy_projection():
    rng = np.random.default_rng(0)
    g = ssocert.Function.psd_indicator(4)
    for _ in range(20):
        a = rng.normal(size=(4, 4))
        a = a + a.T
        lam, p = np.linalg.eigh(a)
        expected = p @ np.diag(np.maximum(lam, 0)) @ p.T
        np.testing.assert_allclose(ssocert.prox(g, 1.0, a), expected, atol=1e-12)


def test_frame_and_canonical_element():
    g = ssocert.Function.psd_indicator(3)
    f = ssocert.frame(g, np.diag([2.0, 0.0, -3.0]))
    assert (f["upper"], f["boundary"], f["lower"]) == ([0], [1], [2])
    w = ssocert.canonical_element(g, np.diag([2.0, 0.0, -3.0]))
    np.testing.assert_allclose(np.diag(w), [1, 1, 0.4, 1, 0, 0], atol=1e-14)
    assert len(ssocert.limiting_elements(g, np.diag([2.0, 0.0, -3.0]))) == 2


def test_gamma_values():
    g = ssocert.Function.psd_indicator(3)
    y = np.zeros((3, 3))
    y[0, 2] = y[2, 0] = 1.0
    a = np.diag([2.0, 0.0, -3.0])
    assert ssocert.gamma(g, a, y) == pytest.approx(3.0)
    assert ssocert.gamma_bruteforce(g, a, y) == pytest.approx(3.0)
    y[1, 2] = y[2, 1] = 1.0
    assert math.isinf(ssocert.gamma(g, a, y))


def test_errors_map_to_value_error():
    g = ssocert.Function.psd_indicator(3)
    with pytest.raises(ValueError):
        ssocert.prox(g, 1.0, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        ssocert.Function.nuclear_norm(3, 2)


def test_certify_fixture():
    report = ssocert.certify(str(FIXTURES / "psd3_holds.json"), [1, 10, 100, 1000], seed=42)
    assert report["equivalence_verdict"] == "consistent"
    assert report["ssosc"]["holds"] is True
    assert [e["sigma"] for e in report["sweep"]] == [1, 10, 100, 1000]


def test_vacuous_margin_is_infinite_string():
    report = ssocert.certify(str(FIXTURES / "scalar_vacuous.json"))
    assert report["ssosc"]["margin"] == "+inf"


def test_cli_entry_and_selftest():
    code, out, err = ssocert.main(["kkt", "--problem", str(FIXTURES / "scalar_holds.json")])
    assert code == 0, err
    assert '"valid": true' in out
    code, _, _ = ssocert.main(["kkt", "--problem", "/nonexistent.json"])
    assert code == 1
    report = ssocert.selftest(trials=5, seed=7)
    assert all(s["pass"] for s in report["selftest"])
