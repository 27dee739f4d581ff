import json
import math
import os
import subprocess

import pytest

import spf


def test_database_roundtrip():
    d = spf.Database([("alice", 1.0), ("bob", 2.0), ("carol", 3.0)])
    assert len(d) == 3
    assert sorted(d.values()) == [1.0, 2.0, 3.0]
    assert ("bob", 2.0) in d.rows()

    from_values = spf.Database.from_values([4.0, 5.0])
    assert len(from_values) == 2


def test_general_recursion_matches_fast_path():
    d = spf.Database([("a", 5.0), ("b", -2.0), ("c", 9.0), ("d", 0.5)])
    bounds = spf.SensitivityBounds.uniform(1.0)

    def median(sub):
        values = sorted(sub.values())
        n = len(values)
        if n % 2 == 1:
            return values[n // 2]
        return 0.5 * (values[n // 2 - 1] + values[n // 2])

    g, memo = spf.preprocess(median, 0.0, bounds, d)
    fast = spf.preprocess_ordered("median", 0.0, 0.0, 1.0, d)
    assert g == pytest.approx(fast, abs=1e-12)
    assert memo.n() == 4
    assert memo.value((1 << 4) - 1) == g
    assert spf.sensitivity_audit(memo, bounds, d) == []

    value, witness, exact = spf.error_bound(median, 0.0, bounds, d)
    assert exact
    assert sorted(witness) == [0, 1, 2, 3]
    assert abs(median(d) - g) <= value + 1e-12


def test_statistics_and_bounds():
    d = spf.Database.from_values([1.0, 2.0, 3.0])
    assert spf.mean(d) == pytest.approx(2.0)
    assert spf.variance(d) == pytest.approx(2.0 / 3.0)
    assert spf.evaluate_statistic("max", d) == 3.0

    assert spf.preprocess_ordered("mean", 2.0, 0.0, 1.0, d) == pytest.approx(2.0)
    assert spf.mean_error_bound(2.0, 1.0, d) == pytest.approx(16.0)
    assert spf.variance_error_bound(1.0, spf.Database.from_values([0.0, 10.0])) == pytest.approx(222.0)

    lower, upper = spf.mean_bounding(2.0, 1.0, d)
    g = spf.preprocess_ordered("mean", 2.0, 0.0, 1.0, d)
    assert lower - 1e-12 <= g <= upper + 1e-12


def test_size_cap_raises():
    d = spf.Database.from_values(list(range(6)))
    with pytest.raises(spf.SizeLimitError):
        spf.preprocess(lambda sub: 0.0, 0.0, spf.SensitivityBounds.uniform(1.0), d, max_n=4)


def test_noise_is_seed_deterministic():
    bounds = spf.SensitivityBounds.uniform(1.0)
    eps = spf.PersonalEpsilons.uniform(0.5)
    assert spf.noise_scale(bounds, eps) == pytest.approx(2.0)

    first = spf.laplace_mechanism(10.0, bounds, eps, spf.UniformRng(7))
    second = spf.laplace_mechanism(10.0, bounds, eps, spf.UniformRng(7))
    assert first == second

    scores = [("a", 1.0), ("b", 0.0)]
    pick1 = spf.exponential_mechanism(scores, bounds, eps, spf.UniformRng(3))
    pick2 = spf.exponential_mechanism(scores, bounds, eps, spf.UniformRng(3))
    assert pick1 == pick2
    assert pick1 in ("a", "b")

    assert spf.laplace_pdf(0.0, 1.0) == pytest.approx(0.5)
    assert spf.privacy_ratio_audit([0.25, 0.75], [0.25, 0.75]) == 0.0


def test_ball_geometry():
    box = spf.intersect_balls([((0.0, 0.0), 1.0), ((2.0, 0.0), 1.0)])
    assert box == (1.0, 1.0, 1.0, 1.0)
    assert spf.intersect_balls([((0.0, 0.0), 1.0), ((5.0, 0.0), 1.0)]) is None

    single = spf.intersect_balls([((0.0, 0.0), 1.0)])
    projected = spf.project_to_box(single, (2.0, 0.0))
    assert projected == pytest.approx((1.0, 0.0))
    inside = spf.project_to_box(single, (0.1, -0.2))
    assert inside == pytest.approx((0.1, -0.2))


@pytest.mark.skipif("SPF_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_binary(tmp_path):
    data = tmp_path / "data.csv"
    data.write_text("id,value\nalice,1\nbob,2\ncarol,3\n")
    result = subprocess.run(
        [os.environ["SPF_CLI"], "mean", str(data), "--delta", "1",
         "--mu-hat", "2", "--json"],
        capture_output=True, text=True, check=True)
    report = json.loads(result.stdout)
    assert report["statistic"] == "mean"
    assert report["n"] == 3
    assert report["raw_value"] == 2.0
    assert report["g_value"] == 2.0
    assert report["error_bound"] == 16.0
    assert math.isfinite(report["seed"])
