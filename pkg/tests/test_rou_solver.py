"""
Tests for the torsion equation solver.
"""

from fractions import Fraction

import numpy as np
import pytest
import sympy

from prymcurves.core.exactmath import CycloElt, QuadElt
from prymcurves.core.exceptions import IdentityCheckFailed, InvalidInputError
from prymcurves.core.models import SolutionRecord, SolverOptions, Stratum
from prymcurves.core.pipeline import solutions_payload
from prymcurves.core.rou_solver import (
    PREFILTER_PRIMES,
    R,
    RelationSolution,
    admissible_orders,
    brute_force_solutions,
    check_identities,
    enumerate_solutions,
    is_excluded,
    order_set_report,
    prefilter_pairs,
    quadratic_coefficients,
    solve_relation_instance,
    stratum_orders,
    torsion_polynomial,
    verify_resultant_identity,
    verify_solution,
)


def sqrt_times(c, D0) -> QuadElt:
    return QuadElt(Fraction(0), Fraction(c), D0)


class TestOrderSets:
    """Admissible orders of roots of unity."""

    def test_small_orders_present(self):
        """24 and the published 408 = 24 * 17 are looped."""
        orders = admissible_orders(8, 2)
        assert 24 in orders
        assert 408 in orders

    def test_union_keeps_literal_orders(self):
        """The looped set contains every order of the literal bound."""
        report = order_set_report()
        looped = admissible_orders(8, 2)
        assert set(report["literal_maximal"]) <= looped
        assert set(report["published_not_literal"]) <= looped

    def test_stratum_orders(self):
        """Prym(2,2) also loops 2N and 4N for N in the length four set."""
        assert 48 in stratum_orders(Stratum.PRYM22)
        assert min(stratum_orders(Stratum.PRYM211)) >= 3

    def test_bad_parameters(self):
        """Relations need k >= 2."""
        with pytest.raises(InvalidInputError):
            admissible_orders(1, 2)


class TestInstances:
    """Single (N, e_XY, e_U) instances."""

    def test_prym22_width_ratio_sqrt2_over_2(self):
        """At (12, 2, 3) the equation reduces to r^2 = 1/2."""
        roots = solve_relation_instance(*quadratic_coefficients(Stratum.PRYM22, 12, 2, 3))
        assert roots == [sqrt_times(Fraction(-1, 2), 2), sqrt_times(Fraction(1, 2), 2)]

    def test_prym211_width_ratio_2sqrt2(self):
        """At (6, 3, 2) the equation reduces to r^2 = 8."""
        roots = solve_relation_instance(*quadratic_coefficients(Stratum.PRYM211, 6, 3, 2))
        assert roots == [sqrt_times(-2, 2), sqrt_times(2, 2)]

    def test_verify_solution(self, m1_solution):
        """The known solution satisfies its equation; a wrong r does not."""
        assert verify_solution(m1_solution)
        wrong = RelationSolution(12, 2, 3, sqrt_times(1, 2), Stratum.PRYM22)
        assert not verify_solution(wrong)

    def test_exponents_in_range(self):
        """Exponents outside [1, N - 1] are refused."""
        with pytest.raises(InvalidInputError):
            quadratic_coefficients(Stratum.PRYM22, 12, 0, 3)

    def test_excluded_roots(self):
        """zeta_U = +-1 and the degenerate Prym(2,2) pairs carry no cusp."""
        assert is_excluded(Stratum.PRYM22, 12, 2, 6)
        assert is_excluded(Stratum.PRYM22, 12, 6, 3)
        assert not is_excluded(Stratum.PRYM22, 12, 2, 3)

    def test_prefilter_keeps_solvable_pairs(self):
        """The modular prefilter never drops an exponent that has a solution."""
        assert 3 in prefilter_pairs(Stratum.PRYM22, 12, 2, [1, 3, 5, 7])
        assert 2 in prefilter_pairs(Stratum.PRYM211, 6, 3, [1, 2])

    def test_denominator_divisible_by_prime(self):
        """p x = 1 is solvable over Q yet inconsistent modulo p, but not modulo the other prime."""
        from prymcurves.core.rou_solver import _inconsistent_mod_p
        first, second = PREFILTER_PRIMES
        system = np.zeros((1, 2, 6), dtype=np.int64)
        system[0, 0, 0] = first
        system[0, 0, 5] = 1
        assert _inconsistent_mod_p(system, first)[0]
        assert not _inconsistent_mod_p(system, second)[0]

    def test_second_prime_rechecks_rejections(self, monkeypatch):
        """An exponent rejected modulo the first prime survives when the second finds a consistent system."""
        import prymcurves.core.rou_solver as rou_solver
        real = rou_solver._inconsistent_mod_p
        first = PREFILTER_PRIMES[0]

        def first_prime_rejects_all(systems, prime=first):
            if prime == first:
                return np.ones(len(systems), dtype=bool)
            return real(systems, prime)

        monkeypatch.setattr(rou_solver, "_inconsistent_mod_p", first_prime_rejects_all)
        assert prefilter_pairs(Stratum.PRYM22, 12, 2, [1, 3, 5, 7], primes=(first,)) == []
        assert 3 in prefilter_pairs(Stratum.PRYM22, 12, 2, [1, 3, 5, 7])

    def test_all_zero_coefficients(self):
        """A vanishing equation is an input error."""
        zero = CycloElt.zero(5)
        with pytest.raises(InvalidInputError):
            solve_relation_instance(zero, zero, zero)


class TestSolutions:
    """Solution records and enumeration."""

    def test_record_round_trip(self, m1_solution):
        """Records keep the exact width ratio."""
        record = SolutionRecord.model_validate_json(m1_solution.to_record().model_dump_json())
        assert RelationSolution.from_record(record) == m1_solution

    def test_conjugate(self, m1_solution):
        """Complex conjugation negates both exponents."""
        assert m1_solution.conjugate().key()[1:4] == (12, 10, 9)

    def test_enumerate_small_orders(self):
        """Orders {6, 12} for Prym(2,2) contain the sqrt(2)/2 solution and its conjugate."""
        found = enumerate_solutions(Stratum.PRYM22, SolverOptions(), orders=[6, 12])
        keys = {(s.N, s.eXY, s.eU, s.r) for s in found}
        assert (12, 2, 3, sqrt_times(Fraction(1, 2), 2)) in keys
        assert (12, 10, 9, sqrt_times(Fraction(1, 2), 2)) in keys
        assert all(s.r > 0 and s.r.norm() < 0 for s in found)
        assert found == sorted(found, key=RelationSolution.sort_key)

    def test_field_filter(self):
        """--fields keeps only the requested trace fields."""
        found = enumerate_solutions(Stratum.PRYM22, SolverOptions(fields=[2]), orders=[12])
        assert found and all(s.D0 == 2 for s in found)

    @pytest.mark.slow
    def test_worker_count_does_not_change_payload(self):
        """Solutions serialize byte for byte the same with 1, 4 and 16 workers."""
        payloads = set()
        for jobs in (1, 4, 16):
            found = enumerate_solutions(Stratum.PRYM22, SolverOptions(jobs=jobs), orders=[6, 12, 24])
            payloads.add(solutions_payload(found))
        assert len(payloads) == 1

    @pytest.mark.slow
    @pytest.mark.parametrize("stratum", list(Stratum))
    def test_prefilter_and_galois_agree_with_brute_force(self, stratum):
        """Every search mode finds the same solutions on all looped orders up to 24."""
        orders = [n for n in stratum_orders(stratum) if n <= 24]
        assert 24 in orders
        brute = {s for s in brute_force_solutions(stratum, orders) if s.N in orders}
        plain = set(enumerate_solutions(stratum, SolverOptions(prefilter=False), orders=orders))
        fast = set(enumerate_solutions(stratum, SolverOptions(), orders=orders))
        galois = set(enumerate_solutions(stratum, SolverOptions(galois_reduction=True), orders=orders))
        assert plain == fast == galois == brute


class TestResultantIdentity:
    """Elimination identity between the residue conditions and the torsion equation."""

    @pytest.mark.paper
    @pytest.mark.slow
    @pytest.mark.parametrize("stratum", list(Stratum))
    def test_identity_holds(self, stratum):
        """The resultant is a multiple of the squared torsion polynomial."""
        assert verify_resultant_identity(stratum)

    @pytest.mark.slow
    def test_perturbed_polynomial_fails(self):
        """Changing the torsion polynomial breaks the identity."""
        perturbed = torsion_polynomial(Stratum.PRYM22) + R
        assert not verify_resultant_identity(Stratum.PRYM22, perturbed)

    def test_check_identities_raises(self, monkeypatch):
        """A failed identity surfaces as IdentityCheckFailed."""
        import prymcurves.core.rou_solver as rou_solver
        monkeypatch.setattr(rou_solver, "verify_resultant_identity", lambda stratum: False)
        with pytest.raises(IdentityCheckFailed):
            check_identities([Stratum.PRYM22])

    def test_torsion_polynomial_is_quadratic_in_r(self):
        """a r^2 + b r + c."""
        assert sympy.degree(torsion_polynomial(Stratum.PRYM211), R) == 2


@pytest.mark.paper
@pytest.mark.slow
class TestPublishedSolutions:
    """Full searches against the published solution tables."""

    @pytest.mark.parametrize("stratum", list(Stratum))
    def test_solution_tables(self, stratum):
        """16 solutions for Prym(2,1,1) and 32 for Prym(2,2)."""
        from prymcurves.core.reference_tables import compare_solutions
        compare_solutions(stratum, enumerate_solutions(stratum))

    @pytest.mark.parametrize("stratum", list(Stratum))
    def test_representatives_verify(self, stratum):
        """Every published representative solves its equation."""
        from prymcurves.core.reference_tables import expected_solutions
        for N, eXY, eU, r in expected_solutions(stratum):
            assert verify_solution(RelationSolution(N, eXY, eU, r, stratum))
