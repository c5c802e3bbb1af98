"""Tensor eigenvalue streams against exhaustive enumeration, and the
spectral algorithm built on them."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from activevars import (
    TensorEigenStream,
    build_spectrum,
    custom_kernel,
    eigencount,
    eigenvalue_decay_bound,
    optimal_algorithm,
    orthogonal_truncation_level,
    power_sum,
    power_sum_identity,
)
from activevars.errors import (
    InvalidConfigurationError,
    TailCertificateError,
)

import oracles


def drain_distinct(stream):
    out = []
    while True:
        try:
            de = stream.next_eigenvalue()
        except StopIteration:
            return out
        out.append((de.value, de.multiplicity))


class TestStream:
    def test_reference_sequence(self, custom_pair):
        stream = TensorEigenStream(2, custom_pair)
        got = [stream.next_eigenvalue() for _ in range(5)]
        assert [(g.value, g.multiplicity) for g in got] == [
            (1.0, 1),
            (0.25, 2),
            (0.0625, 3),
            (0.015625, 2),
            (0.00390625, 1),
        ]
        # the merged value 0.0625 combines a deep index with a pair of low ones
        assert got[2].labels == ((1, (2,)), (2, (1, 1)))

    def test_first_value_is_always_one(self, custom_quad, korobov1):
        for d in (1, 2, 7):
            for s in (custom_quad, korobov1):
                entry = next(TensorEigenStream(d, s))
                assert entry.value == 1.0
                assert entry.label == (0, ())
                assert entry.multiplicity == 1

    def test_d1_stream_is_the_univariate_sequence(self, custom_quad):
        stream = TensorEigenStream(1, custom_quad)
        values = [e.value for e in stream]
        assert values == [1.0, 0.5, 0.25, 0.125, 0.0625]

    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize(
        "lams",
        [
            (0.5, 0.125),
            (0.5, 0.25, 0.125, 0.0625),
            (0.5, 0.5, 0.25),  # repeated eigenvalue
        ],
    )
    def test_equals_exhaustive_enumeration(self, d, lams):
        s = build_spectrum(custom_kernel(lams))
        got = drain_distinct(TensorEigenStream(d, s))
        assert got == oracles.exhaustive_tensor_values(d, lams)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_label_multiplicities_match_brute_force(self, d, custom_quad):
        lams = list(custom_quad.leading())
        want = oracles.exhaustive_label_multiplicities(d, lams)
        got = {}
        for entry in TensorEigenStream(d, custom_quad):
            got[entry.label] = got.get(entry.label, 0) + entry.multiplicity
        assert got == want

    def test_multiplicity_conservation(self, custom_quad):
        for d in (1, 2, 3):
            total = sum(e.multiplicity for e in TensorEigenStream(d, custom_quad))
            n = custom_quad.n_eigenvalues
            assert total == sum(
                math.comb(d, l) * n**l for l in range(d + 1)
            )

    def test_equal_values_emitted_in_lexicographic_label_order(self, custom_pair):
        stream = TensorEigenStream(2, custom_pair)
        labels = [e.label for e in stream]
        assert labels.index((1, (2,))) < labels.index((2, (1, 1)))

    @given(
        d=st.integers(1, 3),
        exponents=st.lists(
            st.integers(1, 12), min_size=1, max_size=4, unique=True
        ),
    )
    @settings(max_examples=50, deadline=None)
    def test_monotone_emission_everywhere(self, d, exponents):
        lams = tuple(sorted((2.0**-e for e in exponents), reverse=True))
        s = build_spectrum(custom_kernel(lams))
        values = [e.value for e in TensorEigenStream(d, s)]
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert drain_distinct(TensorEigenStream(d, s)) == (
            oracles.exhaustive_tensor_values(d, lams)
        )

    def test_rejects_dominating_eigenvalue(self):
        s = build_spectrum(custom_kernel([3.0]))
        with pytest.raises(InvalidConfigurationError):
            TensorEigenStream(2, s)


class TestEigencount:
    def test_reference_point(self, custom_pair):
        assert eigencount(math.sqrt(0.1), 2, custom_pair) == 3

    def test_only_the_constant_exceeds_a_loose_demand(self, custom_pair, korobov1):
        eps = math.sqrt(1.0 - 1e-12)
        assert eigencount(eps, 2, custom_pair) == 1
        assert eigencount(eps, 5, korobov1) == 1

    def test_matches_exhaustive_count(self, custom_quad):
        lams = list(custom_quad.leading())
        for d in (1, 2, 3):
            grouped = oracles.exhaustive_tensor_values(d, lams)
            for eps_sq in (0.9, 0.3, 0.1, 0.01, 1e-4):
                want = sum(cnt for v, cnt in grouped if v > eps_sq)
                assert eigencount(math.sqrt(eps_sq), d, custom_quad) == want

    def test_closed_form_cap(self, korobov1):
        # n <= ceil(e^{L(tau) d^{1-tau}} eps^{-2 tau}) - 1 at tau = 1.
        ltau = power_sum(korobov1, 1.0)
        for d in (1, 2, 10, 50):
            for eps in (0.5, 0.1, 0.01):
                n = eigencount(eps, d, korobov1)
                cap = math.ceil(math.exp(ltau) * eps**-2.0) - 1
                assert n <= cap

    def test_tail_certificate_refusal(self):
        s = build_spectrum(custom_kernel([0.5, 0.125]))
        assert s.tail_bound == 0.0  # finite spectra never refuse
        shallow = build_spectrum(
            __import__("activevars").korobov_kernel(1.0), 10
        )
        with pytest.raises(TailCertificateError):
            eigencount(1e-6, 2, shallow)


class TestOptimalAlgorithm:
    def test_reference_point(self, custom_pair):
        alg = optimal_algorithm(math.sqrt(0.1), 2, custom_pair)
        assert alg.n_terms == 3
        assert alg.worst_case_error == 0.25
        assert alg.max_act == 1

    def test_empty_algorithm_boundary(self, custom_pair):
        alg = optimal_algorithm(1.0, 2, custom_pair)
        assert alg.n_terms == 0
        assert alg.worst_case_error == 1.0
        assert alg.max_act == 0

    def test_worst_case_error_is_next_value(self, custom_quad):
        lams = list(custom_quad.leading())
        for d in (1, 2, 3):
            grouped = oracles.exhaustive_tensor_values(d, lams)
            flat = [v for v, cnt in grouped for _ in range(cnt)]
            for eps_sq in (0.3, 0.1, 0.01):
                alg = optimal_algorithm(math.sqrt(eps_sq), d, custom_quad)
                if alg.n_terms < len(flat):
                    assert alg.worst_case_error == math.sqrt(flat[alg.n_terms])

    def test_fewer_terms_cannot_reach_the_demand(self, custom_quad):
        # Spectral characterization: dropping the last retained value leaves
        # a worst-case error above the demand.
        eps = math.sqrt(0.1)
        alg = optimal_algorithm(eps, 2, custom_quad)
        values = [e.value for e in alg.entries for _ in range(e.multiplicity)]
        assert math.sqrt(values[-1]) > eps

    def test_exhausted_spectrum_reaches_zero_error(self, custom_pair):
        alg = optimal_algorithm(1e-3, 1, custom_pair)
        assert alg.n_terms == 3
        assert alg.worst_case_error == 0.0

    def test_rescaled_demand(self, custom_pair):
        assert (
            optimal_algorithm(0.5, 2, custom_pair, c_const=4.0).n_terms
            == optimal_algorithm(0.25, 2, custom_pair).n_terms
        )

    def test_active_variable_ceiling(self, korobov1):
        for d in (2, 10, 100):
            for eps in (0.1, 0.01, 1e-3):
                alg = optimal_algorithm(eps, d, korobov1)
                ceiling = orthogonal_truncation_level(eps, d, korobov1.c0sq, 1.0)
                assert alg.max_act <= ceiling
                assert alg.m2_ceiling == ceiling

    def test_wiener_is_rejected(self, wiener):
        with pytest.raises(InvalidConfigurationError):
            optimal_algorithm(0.1, 2, wiener)


class TestPowerSumIdentity:
    def test_reference_instance(self, custom_pair):
        res = power_sum_identity(2, custom_pair, 1.0)
        assert res.exact
        assert res.lhs == pytest.approx(1.72265625, rel=1e-15)
        assert res.rhs == pytest.approx(1.72265625, rel=1e-15)
        assert res.lhs == 1.0 + 0.625 + 0.09765625

    def test_d1_reduces_to_univariate_sum(self, custom_quad):
        res = power_sum_identity(1, custom_quad, 1.0)
        assert res.lhs == pytest.approx(1.0 + power_sum(custom_quad, 1.0), rel=1e-15)
        assert res.rhs == pytest.approx(res.lhs, rel=1e-15)

    @pytest.mark.parametrize("tau", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_exact_for_finite_spectra(self, custom_quad, d, tau):
        res = power_sum_identity(d, custom_quad, tau)
        assert res.lhs == pytest.approx(res.rhs, rel=1e-12)

    def test_divergence_witness_grows_without_bound(self, korobov1):
        # Sub-unit exponents make the closed form blow up with dimension.
        tau = 0.75
        rhs = [power_sum_identity(d, korobov1, tau).rhs for d in (10, 100, 1000, 10_000)]
        assert all(a < b for a, b in zip(rhs, rhs[1:]))
        d = 10
        while d <= 10_000:
            assert (
                power_sum_identity(2 * d, korobov1, tau).rhs
                > power_sum_identity(d, korobov1, tau).rhs
            )
            d *= 2

    def test_truncated_spectra_are_flagged(self, korobov1):
        res = power_sum_identity(4, korobov1, 1.0)
        assert not res.exact
        assert res.lhs <= res.rhs


class TestDecayBound:
    def test_first_eigenvalue_bounded_by_one(self, custom_pair, korobov1):
        for s in (custom_pair, korobov1):
            for tau in (1.0, 2.0):
                assert eigenvalue_decay_bound(5, 1, s, tau) >= 1.0

    def test_dominates_streamed_values(self, custom_pair):
        bound_stream = TensorEigenStream(2, custom_pair)
        k = 0
        for entry in bound_stream:
            for _ in range(entry.multiplicity):
                k += 1
                assert entry.value <= eigenvalue_decay_bound(2, k, custom_pair, 1.0)

    def test_dominates_korobov_prefix(self, korobov1):
        # Same inequality, with the prefactor hoisted out of the loop.
        prefactor = eigenvalue_decay_bound(8, 1, korobov1, 1.0)
        stream = TensorEigenStream(8, korobov1)
        k = 0
        for entry in stream:
            if k >= 10_000:
                break
            k_next = min(k + entry.multiplicity, 10_000)
            # value <= prefactor / k for every rank in the block; the
            # binding case is the first rank.
            assert entry.value <= prefactor / (k + 1)
            k = k_next

    def test_exponential_prefactor_settles_for_tau_at_least_one(self, korobov1):
        ltau = power_sum(korobov1, 1.0)
        for d in (1, 10, 100, 1000):
            pref = math.exp(ltau * d ** (1.0 - 1.0) / 1.0)
            assert pref <= math.exp(ltau) + 1e-15
        # tau > 1: the prefactor approaches 1 from above
        p_small = math.exp(power_sum(korobov1, 2.0) * 1000 ** (1.0 - 2.0) / 2.0)
        assert 1.0 < p_small < 1.001
