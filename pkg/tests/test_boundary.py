import json

import numpy as np
import pytest

from tropmartin.boundary import (
    BallTooLarge,
    BelowSpectralRadius,
    ChainRule,
    FileRule,
    InconsistentProbes,
    NonTightRule,
    NotAPath,
    NotMetric,
    TripodRule,
    Z2Rule,
    ZRule,
    almost_geodesic_check,
    column_limit,
    construct_eigenvector,
    get_rule,
    h_flat_self,
    rieffel_check,
    truncate,
)
from tropmartin.boundary.fixtures import FIXTURES, fixture_suite
from tropmartin.boundary.rules import decode, encode
from tropmartin.core import TropicalError


class TestCodec:
    @pytest.mark.parametrize("node", [0, -7, (2, 1), (0, -3, 1)])
    def test_round_trip(self, node):
        assert decode(encode(node)) == node

    def test_pair_label(self):
        assert encode((2, 1)) == "(2,1)"


class TestTruncate:
    def test_z_ball(self):
        assert sorted(truncate(ZRule(), 3).nodes) == list(range(-3, 4))

    def test_z2_diamond(self):
        for r in (1, 2, 5):
            assert truncate(Z2Rule(), r).n == 2 * r * r + 2 * r + 1

    def test_chain_ball(self):
        tr = truncate(ChainRule(), 3)
        assert tr.nodes == (0, 1, 2, 3)
        arcs = sorted(tr.matrix.arcs())
        assert ("0", "1", 0.0) in arcs and ("3", "0", -1.0) in arcs and ("3", "4", 0.0) not in arcs

    def test_deterministic_order(self):
        assert truncate(Z2Rule(), 3).nodes == truncate(Z2Rule(), 3).nodes
        assert truncate(Z2Rule(), 2).nodes[0] == (0, 0)

    def test_node_cap(self):
        with pytest.raises(BallTooLarge):
            truncate(Z2Rule(), 40, node_cap=100)


class TestGeodesics:
    def test_z_geodesic(self):
        rep = almost_geodesic_check(ZRule(), list(range(11)), 0.0)
        assert rep.ok and set(rep.slacks) == {0.0}

    def test_chain_geodesic(self):
        assert almost_geodesic_check(ChainRule(), list(range(10)), 0.0)

    def test_backtrack(self):
        rep = almost_geodesic_check(ZRule(), [0, 1, 0, 1, 2], 1.0)
        assert not rep.ok and rep.first_violation == 2 and rep.slacks[1] == 2.0

    def test_u_mode(self):
        u = {i: float(i) for i in range(-5, 6)}
        assert almost_geodesic_check(ZRule(), [0, 1, 2, 3], 0.0, u=u)
        assert not almost_geodesic_check(ZRule(), [0, -1, -2], 0.5, u=u)

    def test_not_a_path(self):
        with pytest.raises(NotAPath):
            almost_geodesic_check(ZRule(), [0, 2], 0.0)

    def test_negative_alpha(self):
        with pytest.raises(TropicalError):
            almost_geodesic_check(ZRule(), [0, 1], -1.0)


class TestRieffel:
    def test_straight(self):
        assert rieffel_check(ZRule(), list(range(10)), 1e-6)

    def test_backtrack(self):
        rep = rieffel_check(ZRule(), [0, 1, 0, 1, 2, 3], 0.5)
        assert not rep.ok and rep.worst == 2.0

    def test_staircase(self):
        stair = [(k // 2 + k % 2, k // 2) for k in range(12)]
        assert rieffel_check(Z2Rule(), stair, 1e-9)

    def test_needs_symmetry(self):
        with pytest.raises(NotMetric):
            rieffel_check(ChainRule(), [0, 1, 2], 0.5)


class TestColumnLimit:
    def test_z_plus(self):
        est = column_limit(ZRule(), lambda k: k, 3)
        assert est.converged and est.residual == 0
        assert est.values == {i: float(i) for i in range(-3, 4)}

    def test_chain_is_zero(self):
        est = column_limit(ChainRule(), lambda k: k, 4)
        assert set(est.values.values()) == {0.0}

    def test_tripod_middle_ray(self):
        est = column_limit(TripodRule(), lambda k: (k, 1), 4)
        for (i, j), v in est.values.items():
            assert v == max(i - j + 1, i + j - 1)

    def test_sequence_targets(self):
        est = column_limit(ZRule(), [20, 21, 22], 3)
        assert est.sequence_tail == (20, 21, 22) and est.vector(range(-3, 4)).tolist() == list(range(-3, 4))

    def test_fixed_targets_need_flag(self):
        with pytest.raises(TropicalError):
            column_limit(ZRule(), [0, 0, 0], 3)
        est = column_limit(ZRule(), [0, 0, 0], 3, require_escape=False)
        assert est.values[2] == -2

    def test_unknown_target(self):
        with pytest.raises(TropicalError):
            column_limit(ChainRule(), [-1, -2, -3], 2, require_escape=False)

    def test_truncation_stability(self):
        base = column_limit(ZRule(), lambda k: -k, 3)
        wider = column_limit(ZRule(), lambda k: -k, 3, truncation_radius=base.truncation_radius + 3)
        assert base.values == wider.values

    def test_labelled(self):
        est = column_limit(Z2Rule(), lambda k: (k, k), 1)
        assert est.labelled()["(1,0)"] == 1.0


class TestHFlat:
    def test_z_plus(self):
        est = column_limit(ZRule(), lambda k: k, 3)
        assert h_flat_self(ZRule(), est, [list(range(12))]) == 0.0

    def test_tripod_middle(self):
        rule = TripodRule()
        est = column_limit(rule, lambda k: (k, 1), 4)
        probes = [[(k, 1) for k in range(2, 12)]]
        assert h_flat_self(rule, est, probes) == -2.0

    def test_recurrent_column(self):
        rule = ChainRule(True)
        est = column_limit(rule, [0, 0, 0], 4, require_escape=False)
        assert h_flat_self(rule, est, [[0, 0, 0]]) == 0.0

    def test_inconsistent(self):
        est = column_limit(ZRule(), lambda k: k, 3)
        with pytest.raises(InconsistentProbes):
            h_flat_self(ZRule(), est, [[-k for k in range(12)]])


class TestEigenvector:
    @pytest.mark.parametrize("lam,slope", [(-1, 0), (-0.5, 0.5), (0, 1), (1, 2)])
    def test_z_slopes(self, lam, slope):
        ev = construct_eigenvector(ZRule(), lam, 4, lambda k: k)
        assert ev.residual == 0 and ev.rho == -1
        for i, v in ev.values.items():
            assert v == pytest.approx(slope * i, abs=1e-12)

    def test_below_rho(self):
        with pytest.raises(BelowSpectralRadius):
            construct_eigenvector(ZRule(), -1.5, 4, lambda k: k)

    def test_chain_harmonic(self):
        ev = construct_eigenvector(ChainRule(), 0.0, 5, lambda k: k)
        assert set(ev.values.values()) == {0.0}

    def test_needs_row_finite(self):
        with pytest.raises(TropicalError):
            construct_eigenvector(NonTightRule(), 0.0, 3, lambda k: k)


class TestRules:
    def test_get_rule(self):
        assert get_rule("tripod").basepoint == (0, 1)
        with pytest.raises(TropicalError):
            get_rule("nope")

    def test_file_rule_matches_z(self, tmp_path):
        spec = {"dim": 1, "symmetric": True, "offsets": [{"delta": [1], "weight": -1}, {"delta": [-1], "weight": -1}]}
        path = tmp_path / "z.json"
        path.write_text(json.dumps(spec))
        rule = get_rule(f"file:{path}")
        assert isinstance(rule, FileRule)
        assert truncate(rule, 4).matrix == truncate(ZRule(), 4).matrix

    def test_file_rule_bounds(self):
        rule = FileRule({"dim": 1, "offsets": [{"delta": [1], "weight": 0}, {"delta": [-1], "weight": -2}], "bounds": [[0, None]]})
        assert not rule.contains(-1)
        assert column_limit(rule, lambda k: k, 3).values[2] == 0.0

    def test_malformed_file_rule(self):
        with pytest.raises(TropicalError):
            FileRule({"dim": 2, "offsets": [{"delta": [1], "weight": -1}]})


class TestFixtureSuite:
    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_fixture(self, name):
        failures = [a for a in FIXTURES[name]() if not a.passed]
        assert not failures, failures

    def test_suite_reports_crash(self, monkeypatch):
        def boom():
            raise RuntimeError("x")

        monkeypatch.setitem(FIXTURES, "z", boom)
        rep = fixture_suite(["z"])
        assert not rep.passed and rep.failures()[0].name == "z ran"
