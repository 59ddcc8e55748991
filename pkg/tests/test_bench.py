import pytest

from ibepair import bench
from ibepair.entropy import SeededEntropy


def test_timing_statistics():
    t = bench.Timing("x", (5, 1, 3, 100))
    assert (t.min_ns, t.median_ns, t.mean_ns) == (1, 4, 27)


def test_argument_checks():
    with pytest.raises(ValueError):
        bench.run_bench(64, 9, SeededEntropy(1))
    with pytest.raises(ValueError):
        bench.run_bench(64, 10, SeededEntropy(1), modes=("polar",))


def test_profile_shrinks_q_for_small_p():
    assert bench.bench_profile(512).bits_q == 160
    assert bench.bench_profile(64).bits_q == 52


def test_gate_runs_before_timing(monkeypatch):
    calls = []
    real = bench.apply_precomputed

    def wrong(pre, Q, ctx, validate=True):
        calls.append(1)
        return real(pre, Q, ctx, validate) ** 2

    monkeypatch.setattr(bench, "apply_precomputed", wrong)
    with pytest.raises(bench.CorrectnessGateFailed):
        bench.run_bench(64, 10, SeededEntropy(1))
    assert len(calls) == 1


def test_report_lines(pkg512):
    params, master = pkg512
    rep = bench.run_bench(512, 10, SeededEntropy(2), params=params, master=master)
    lines = rep.machine_lines()
    assert [l.split(",")[1] for l in lines] == list(bench.MODES)
    assert all(l.startswith("bench,") and l.split(",")[2:4] == ["512", "10"] for l in lines)
    text = rep.render()
    assert "encrypt" in text and "decrypt" in text and "hardware-dependent" in text


def test_projective_not_slower_than_affine(pkg512):
    params, master = pkg512
    rep = bench.run_bench(512, 30, SeededEntropy(3), params=params, include_ibe=False)
    assert rep.pairings["projective"].median_ns <= rep.pairings["affine"].median_ns
    assert rep.pairings["precomp"].median_ns < rep.pairings["affine"].median_ns
