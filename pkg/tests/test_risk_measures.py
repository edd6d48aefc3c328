"""Coherent risk measures: values, axioms, and dual maximizers."""

import numpy as np
import pytest

from scorerisk import (
    CapabilityError,
    CoherentRiskMeasure,
    DomainError,
    MeasureWeights,
    ScenarioVariable,
    ValidationError,
    dual_maximizer,
    expectation,
    risk_value,
)
from scorerisk.risk import evaluate_batch, payoff_gradient

from conftest import uvar, wvar

ALL_RISKS = [
    CoherentRiskMeasure.el(),
    CoherentRiskMeasure.es(0.1),
    CoherentRiskMeasure.es(0.5),
    CoherentRiskMeasure.es(0.95),
    CoherentRiskMeasure.evar(0.2),
    CoherentRiskMeasure.evar(0.5),
    CoherentRiskMeasure.msd(0.0),
    CoherentRiskMeasure.msd(0.6),
    CoherentRiskMeasure.msd(1.0),
    CoherentRiskMeasure.ml(),
]


def random_variable(rng, n=None):
    n = n or int(rng.integers(3, 20))
    return wvar(rng.normal(0, 2, n), rng.dirichlet(np.ones(n)))


class TestConstruction:
    @pytest.mark.parametrize(
        "maker, bad",
        [
            (CoherentRiskMeasure.es, 0.0),
            (CoherentRiskMeasure.es, 1.0),
            (CoherentRiskMeasure.evar, 0.6),
            (CoherentRiskMeasure.evar, 0.0),
            (CoherentRiskMeasure.msd, 1.5),
            (CoherentRiskMeasure.msd, -0.1),
        ],
    )
    def test_domain_checks(self, maker, bad):
        with pytest.raises(DomainError):
            maker(bad)

    def test_parse_round_trip(self):
        for rho in ALL_RISKS:
            assert CoherentRiskMeasure.parse(rho.spec_string()) == rho

    @pytest.mark.parametrize("text", ["", "var", "es", "el:1", "es:0.1:0.2", "msd:x"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValidationError):
            CoherentRiskMeasure.parse(text)

    def test_capability_flag(self):
        assert CoherentRiskMeasure.el().has_dual_maximizer
        assert CoherentRiskMeasure.es(0.3).has_dual_maximizer
        assert CoherentRiskMeasure.ml().has_dual_maximizer
        assert not CoherentRiskMeasure.evar(0.2).has_dual_maximizer
        assert not CoherentRiskMeasure.msd(0.5).has_dual_maximizer


class TestValues:
    def test_expected_loss(self):
        assert risk_value(CoherentRiskMeasure.el(), uvar([1, 2, 3])) == -2.0

    def test_expected_shortfall_half(self):
        assert risk_value(CoherentRiskMeasure.es(0.5), uvar([1, 2, 3, 4])) == -1.5

    def test_expected_shortfall_fractional_atom(self):
        # alpha=0.3 on 4 uniform outcomes: full atom on the worst (mass
        # 0.25) plus 0.05 on the next; -(0.25*1 + 0.05*2)/0.3
        value = risk_value(CoherentRiskMeasure.es(0.3), uvar([1, 2, 3, 4]))
        assert value == pytest.approx(-(0.25 * 1 + 0.05 * 2) / 0.3, abs=1e-14)

    def test_maximum_loss(self):
        assert risk_value(CoherentRiskMeasure.ml(), uvar([-3, 0, 7])) == 3.0

    def test_msd_manual(self):
        Z = uvar([-1.0, 1.0])
        # mean 0, lower semideviation sqrt(0.5); value = 0 + beta*sqrt(0.5)
        assert risk_value(CoherentRiskMeasure.msd(0.6), Z) == pytest.approx(
            0.6 * np.sqrt(0.5), abs=1e-14
        )
        assert risk_value(CoherentRiskMeasure.msd(0.0), Z) == pytest.approx(0.0, abs=1e-15)

    def test_evar_half_equals_expected_loss(self, rng):
        el = CoherentRiskMeasure.el()
        ev = CoherentRiskMeasure.evar(0.5)
        for _ in range(20):
            Z = random_variable(rng)
            assert risk_value(ev, Z) == pytest.approx(risk_value(el, Z), abs=1e-10)

    def test_es_approaches_expected_loss(self, rng):
        Z = random_variable(rng)
        el = risk_value(CoherentRiskMeasure.el(), Z)
        assert risk_value(CoherentRiskMeasure.es(1.0 - 1e-12), Z) == pytest.approx(el, abs=1e-9)

    def test_constant_variable(self):
        Z = uvar([2.5, 2.5, 2.5])
        for rho in ALL_RISKS:
            assert risk_value(rho, Z) == pytest.approx(-2.5, abs=1e-11)

    def test_batch_matches_scalar(self, rng):
        n = 11
        p = rng.dirichlet(np.ones(n))
        Z = rng.normal(0, 2, (7, n))
        for rho in ALL_RISKS:
            batch = evaluate_batch(rho, Z, p)
            for k in range(Z.shape[0]):
                assert batch[k] == pytest.approx(
                    risk_value(rho, wvar(Z[k], p)), abs=1e-11
                )


class TestAxioms:
    @pytest.mark.parametrize("rho", ALL_RISKS, ids=lambda r: r.spec_string())
    def test_monotonicity(self, rho, rng):
        for _ in range(30):
            Z = random_variable(rng)
            W = Z.with_values(Z.values + rng.uniform(0, 1, Z.values.size))
            assert risk_value(rho, Z) >= risk_value(rho, W) - 1e-10

    @pytest.mark.parametrize("rho", ALL_RISKS, ids=lambda r: r.spec_string())
    def test_translation_invariance(self, rho, rng):
        for _ in range(30):
            Z = random_variable(rng)
            c = float(rng.normal(0, 3))
            shifted = Z.with_values(Z.values + c)
            assert risk_value(rho, shifted) == pytest.approx(
                risk_value(rho, Z) - c, abs=1e-10
            )

    @pytest.mark.parametrize("rho", ALL_RISKS, ids=lambda r: r.spec_string())
    def test_positive_homogeneity(self, rho, rng):
        for _ in range(30):
            Z = random_variable(rng)
            lam = float(rng.uniform(0, 4))
            assert risk_value(rho, Z.with_values(lam * Z.values)) == pytest.approx(
                lam * risk_value(rho, Z), abs=1e-10
            )

    @pytest.mark.parametrize("rho", ALL_RISKS, ids=lambda r: r.spec_string())
    def test_subadditivity(self, rho, rng):
        for _ in range(30):
            Z = random_variable(rng)
            W = Z.with_values(rng.normal(0, 2, Z.values.size))
            combined = Z.with_values(Z.values + W.values)
            assert risk_value(rho, combined) <= risk_value(rho, Z) + risk_value(rho, W) + 1e-10

    @pytest.mark.parametrize("rho", ALL_RISKS, ids=lambda r: r.spec_string())
    def test_loadedness(self, rho, rng):
        el = CoherentRiskMeasure.el()
        for _ in range(30):
            Z = random_variable(rng)
            assert risk_value(rho, Z) >= risk_value(el, Z) - 1e-12

    def test_es_ordering_in_alpha(self, rng):
        for _ in range(20):
            Z = random_variable(rng)
            a1, a2 = sorted(rng.uniform(0.05, 0.95, 2))
            assert risk_value(CoherentRiskMeasure.es(a1), Z) >= risk_value(
                CoherentRiskMeasure.es(a2), Z
            ) - 1e-12


class TestDualMaximizer:
    def test_el_returns_base_measure(self, rng):
        Z = random_variable(rng)
        q = dual_maximizer(CoherentRiskMeasure.el(), Z)
        np.testing.assert_allclose(q.q, Z.space.p, rtol=1e-12)

    def test_es_tail_reweighting(self):
        q = dual_maximizer(CoherentRiskMeasure.es(0.5), uvar([1, 2, 3, 4]))
        np.testing.assert_allclose(q.q, [0.5, 0.5, 0.0, 0.0])

    def test_ml_point_mass_lowest_index(self):
        q = dual_maximizer(CoherentRiskMeasure.ml(), uvar([-3, 0, 7]))
        np.testing.assert_array_equal(q.q, [1.0, 0.0, 0.0])
        # ties break to the lowest index
        q = dual_maximizer(CoherentRiskMeasure.ml(), uvar([0, -3, -3]))
        np.testing.assert_array_equal(q.q, [0.0, 1.0, 0.0])

    def test_unsupported_kinds(self, rng):
        Z = random_variable(rng)
        for rho in (CoherentRiskMeasure.evar(0.2), CoherentRiskMeasure.msd(0.5)):
            with pytest.raises(CapabilityError):
                dual_maximizer(rho, Z)

    @pytest.mark.parametrize(
        "rho",
        [r for r in ALL_RISKS if r.has_dual_maximizer],
        ids=lambda r: r.spec_string(),
    )
    def test_attains_value(self, rho, rng):
        for _ in range(30):
            Z = random_variable(rng)
            q = dual_maximizer(rho, Z)
            attained = expectation(Z.with_values(-Z.values), q)
            assert attained == pytest.approx(risk_value(rho, Z), abs=1e-10)

    def test_es_density_bound(self, rng):
        rho = CoherentRiskMeasure.es(0.35)
        for _ in range(20):
            Z = random_variable(rng)
            q = dual_maximizer(rho, Z)
            assert np.all(q.q <= Z.space.p / 0.35 + 1e-12)

    @pytest.mark.parametrize(
        "rho",
        [r for r in ALL_RISKS if r.has_dual_maximizer],
        ids=lambda r: r.spec_string(),
    )
    def test_dominates_random_feasible_measures(self, rho, rng):
        # feasible points: EL admits only the base measure; ES admits any
        # q <= p/alpha (built by greedily filling alpha mass along a random
        # outcome order, respecting the per-outcome caps); ML admits the
        # whole simplex
        Z = random_variable(rng, 8)
        p = Z.space.p
        value = risk_value(rho, Z)
        neg = Z.with_values(-Z.values)
        for _ in range(100):
            if rho.kind == "el":
                raw = p
            elif rho.kind == "es":
                alpha = rho.param
                w = np.zeros(8)
                remaining = alpha
                for i in rng.permutation(8):
                    take = min(p[i], remaining)
                    w[i] = take
                    remaining -= take
                raw = w / alpha
            else:
                raw = rng.dirichlet(np.ones(8))
            q = MeasureWeights(raw)
            assert expectation(neg, q) <= value + 1e-10


class TestPayoffGradient:
    @pytest.mark.parametrize("rho", ALL_RISKS, ids=lambda r: r.spec_string())
    def test_sums_to_minus_one(self, rho, rng):
        for _ in range(15):
            Z = random_variable(rng)
            grad = payoff_gradient(rho, Z.values, Z.space.p)
            assert float(grad.sum()) == pytest.approx(-1.0, abs=1e-10)

    @pytest.mark.parametrize("rho", ALL_RISKS, ids=lambda r: r.spec_string())
    def test_matches_directional_derivative(self, rho, rng):
        # generic payoffs have no ties, so the subgradient is a gradient
        # and must match central finite differences of the risk value
        h = 1e-6
        for _ in range(10):
            n = 7
            p = rng.dirichlet(np.ones(n))
            z = rng.normal(0, 2, n)
            d = rng.normal(0, 1, n)
            grad = payoff_gradient(rho, z, p)
            plus = evaluate_batch(rho, (z + h * d)[None, :], p)[0]
            minus = evaluate_batch(rho, (z - h * d)[None, :], p)[0]
            assert float(np.dot(grad, d)) == pytest.approx(
                (plus - minus) / (2 * h), abs=5e-5
            )
