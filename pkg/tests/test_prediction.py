import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fovguard.geometry import TileGrid, TileSet, Viewpoint, top_n_tiles
from fovguard.optimizer import StreamClock, manual_plan
from fovguard.prediction import (
    ObservationWindow,
    PrecomputedPredictor,
    PredictionRequest,
    PredictorKind,
    anchor_viewpoint,
    average_doo,
    linear_extrapolation,
    predict,
    predicted_tile_sets,
    resolve_predictor,
    segment_doo,
    shortest_arc,
    trivial_motion,
)
from fovguard.privacy import PrivacySpec
from fovguard.simulator import simulate_trace

G10x20 = TileGrid(10, 20)
TAU = 0.2


def window(*pairs, tau=TAU, t0=0.0):
    return ObservationWindow(tuple(Viewpoint(y, p, t0 + k * tau) for k, (y, p) in enumerate(pairs)), tau)


class TestWindowAndRequest:
    def test_spacing_checked(self):
        with pytest.raises(ValueError):
            ObservationWindow((Viewpoint(0, 0, 0.0), Viewpoint(0, 0, 0.3)), TAU)

    def test_empty_window(self):
        with pytest.raises(ValueError):
            ObservationWindow((), TAU)

    def test_target_times(self):
        req = PredictionRequest(window((0, 0), (0, 0)), gap=0.5, horizon=1.0, sample_interval=TAU)
        times = req.target_times()
        assert len(times) == 5
        assert times[0] == pytest.approx(0.2 + 0.5 + 0.2)
        assert times[-1] == pytest.approx(0.2 + 0.5 + 1.0)


class TestPredictors:
    def test_trivial_repeats_last(self):
        req = PredictionRequest(window((1.0, -0.2), (0.3, 0.1)), 0.3, 1.0, TAU)
        out = predict(PredictorKind.TRIVIAL_MOTION, req)
        assert {(v.yaw, v.pitch) for v in out} == {(0.3, 0.1)}

    def test_linear_zero_velocity(self):
        req = PredictionRequest(window((0.3, 0.1), (0.3, 0.1)), 0.3, 1.0, TAU)
        assert {(v.yaw, v.pitch) for v in linear_extrapolation(req)} == {(0.3, 0.1)}

    def test_linear_hand_integration(self):
        req = PredictionRequest(window((0.0, 0.0), (0.1, 0.0)), 0.0, 2 * TAU, TAU)
        out = linear_extrapolation(req)
        assert [v.yaw for v in out] == pytest.approx([0.2, 0.3])

    def test_linear_wraps_the_short_way(self):
        req = PredictionRequest(window((math.pi - 0.05, 0.0), (-math.pi + 0.05, 0.0)), 0.0, TAU, TAU)
        (v,) = linear_extrapolation(req)
        assert v.yaw == pytest.approx(-math.pi + 0.15)

    def test_linear_clamps_pitch(self):
        req = PredictionRequest(window((0.0, 1.4), (0.0, 1.5)), 0.0, 1.0, TAU)
        assert linear_extrapolation(req)[-1].pitch == math.pi / 2

    def test_linear_needs_two(self):
        with pytest.raises(ValueError):
            linear_extrapolation(PredictionRequest(window((0, 0)), 0.0, 1.0, TAU))

    def test_shortest_arc(self):
        assert shortest_arc(3.0, -3.0) == pytest.approx(2 * math.pi - 6.0)

    def test_resolve(self):
        assert resolve_predictor("trivial_motion") is trivial_motion
        assert resolve_predictor(linear_extrapolation) is linear_extrapolation
        with pytest.raises(ValueError):
            resolve_predictor("lstm")

    @given(st.permutations([(0.1, 0.0), (0.5, 0.2), (-1.0, 0.3), (2.0, -0.4)]))
    def test_trivial_ignores_all_but_last(self, earlier):
        req = PredictionRequest(window(*earlier, (0.7, 0.1)), 0.4, 1.0, TAU)
        assert [(v.yaw, v.pitch) for v in trivial_motion(req)] == [(0.7, 0.1)] * 5

    @given(st.floats(-3, 3), st.floats(-1.5, 1.5), st.floats(-3, 3), st.floats(-1.5, 1.5))
    def test_deterministic(self, y1, p1, y2, p2):
        req = PredictionRequest(window((y1, p1), (y2, p2)), 0.3, 1.0, TAU)
        assert predict("linear_extrapolation", req) == predict("linear_extrapolation", req)


class TestPrecomputed:
    def test_round_trip_and_lookup(self, tmp_path):
        pred = PrecomputedPredictor({("v/u", 3): (0.5, -0.1)})
        path = tmp_path / "pred.csv"
        pred.save(path)
        loaded = PrecomputedPredictor.load(path)
        req = PredictionRequest(window((0, 0)), 0.3, 1.0, TAU, "v/u", 3)
        (v,) = loaded(req)
        assert (v.yaw, v.pitch) == (0.5, -0.1)
        with pytest.raises(KeyError):
            loaded(PredictionRequest(window((0, 0)), 0.3, 1.0, TAU, "v/u", 4))

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("trace_id,yaw_rad\nx,1\n")
        with pytest.raises(ValueError):
            PrecomputedPredictor.load(path)


class TestTileSets:
    def test_anchor_is_middle(self):
        vps = [Viewpoint(0.1 * k, 0, k) for k in range(5)]
        assert anchor_viewpoint(vps) is vps[2]
        assert anchor_viewpoint(vps[:4]) is vps[1]

    def test_single_viewpoint(self):
        vp = Viewpoint(0.4, 0.2)
        assert predicted_tile_sets([vp], G10x20, 33) == top_n_tiles(G10x20, vp, 33)

    def test_full(self):
        assert predicted_tile_sets([Viewpoint(0, 0)], G10x20, 200) == G10x20.full()

    def test_center(self):
        got = predicted_tile_sets([Viewpoint(0, 0)], G10x20, 33)
        assert got.indices()[:5] == [48, 49, 50, 51, 52]
        assert len(got) == 33


class TestDoO:
    def test_perfect(self):
        s = TileSet.from_indices(G10x20, range(1, 9))
        assert average_doo([s, s], [s, s]) == 1.0

    def test_disjoint(self):
        a = TileSet.from_indices(G10x20, range(1, 9))
        b = TileSet.from_indices(G10x20, range(9, 17))
        assert average_doo([a], [b]) == 0.0

    def test_half(self):
        q = TileSet.from_indices(G10x20, range(1, 9))
        e = TileSet.from_indices(G10x20, range(5, 40))
        assert segment_doo(q, e) == 0.5

    def test_errors(self):
        s = TileSet.from_indices(G10x20, [1])
        with pytest.raises(ValueError):
            average_doo([s], [])
        with pytest.raises(ValueError):
            segment_doo(G10x20.empty(), s)

    @settings(max_examples=50)
    @given(st.sets(st.integers(1, 200), min_size=1), st.sets(st.integers(1, 200)))
    def test_range_and_equality(self, q, e):
        qs, es = TileSet.from_indices(G10x20, q), TileSet.from_indices(G10x20, e)
        d = average_doo([qs], [es])
        assert 0.0 <= d <= 1.0
        assert (d == 1.0) == qs.issubset(es)


def test_doo_degrades_with_gap(traces50, video, rates):
    """Mean DoO over 50 random-walk traces does not rise as the prediction gap grows."""
    clock = StreamClock(l0=3, T_seg=1.0, L=30)
    spec = PrivacySpec(0.0)
    means = []
    for gap in (0.2, 0.6, 1.0, 1.4, 1.8):
        plan = manual_plan(clock, TAU, gap, 0.0)
        reports = [simulate_trace(tr, PredictorKind.TRIVIAL_MOTION, spec, plan, clock, video, rates) for tr in traces50]
        means.append(sum(r.average_doo for r in reports) / len(reports))
    assert all(b <= a + 0.02 for a, b in zip(means, means[1:])), means
    assert means[-1] < means[0]
