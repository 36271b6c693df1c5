import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hamsing import CoeffPoly, autonomous_22, branching_23, branching_33, make_spec, painleve_22
from hamsing.auxw import (
    AuxEngine,
    build_J,
    certificate_terms,
    eval_W,
    gamma_slots,
    i_to_j,
    j_to_i,
    mono_weight,
    solve_betas,
)
from hamsing.errors import DegenerateClass, GammaNonzero
from hamsing.model import build_index_set, hamiltonian_value
from hamsing.series import numeric_series, suggested_dps


def brute_J(M, N):
    return {(k, l) for k in range(1, N + 2) for l in range(0, 4 * (M + N + 2))
            if 1 - M * N < k * (M + 1) - l * (N + 1) < M + N + 2}


class TestIndexSetJ:
    def test_22(self):
        assert build_J(2, 2) == {(1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3)}

    def test_degenerate(self):
        with pytest.raises(DegenerateClass):
            build_J(1, 1)

    @given(st.integers(1, 6), st.integers(1, 6))
    def test_brute_force(self, M, N):
        if M * N == 1:
            return
        assert build_J(M, N) == brute_J(M, N)

    @pytest.mark.parametrize("M,N", [(2, 2), (2, 3), (3, 3), (3, 5), (4, 4)])
    def test_correspondence_with_index_set(self, M, N):
        # (k, l) = (j+1, M-i) embeds I minus (0,0), plus the partner (-1, N), into J;
        # whatever else J holds is already a bounded-class monomial
        J = build_J(M, N)
        image = {i_to_j(i, j, M) for i, j in gamma_slots(M, N)}
        assert image <= J
        assert all(k * (M + 1) - l * (N + 1) < 0 for k, l in J - image)
        assert (len(J) == len(image)) == ((M, N) == (2, 2))
        assert (N + 1, M + 1) in J
        assert j_to_i(N + 1, M + 1, M) == (-1, N)
        assert all(i_to_j(*j_to_i(k, l, M), M) == (k, l) for k, l in build_J(M, N))


class TestBetas:
    def test_autonomous_is_hamiltonian(self):
        aux = solve_betas(autonomous_22())
        assert aux.betas == {} and aux.gamma_residues == {}
        assert eval_W(aux, 0.3, 1, 1) == 2
        c = -1 / 3
        for t in (0.5, 0.01 + 0.002j):
            y1, y2 = c / t, 3 * c * c / t
            assert abs(eval_W(aux, 0, y1, y2)) < 1e-10 * abs(y1) ** 3
            assert abs(eval_W(aux, 0, y1, y2) - hamiltonian_value(autonomous_22(), 0, y1, y2)) < 1e-9

    @pytest.mark.parametrize("make", [lambda: painleve_22(beta=0.5, gamma=-1), branching_23, branching_33])
    def test_admissible_specs_have_vanishing_gammas(self, make):
        aux = solve_betas(make())
        assert aux.gamma_residues == {}

    def test_resonance_level_betas_are_zero(self):
        for M, N in [(2, 2), (2, 3), (3, 3)]:
            R = M * N - 1
            sol = solve_betas(make_spec(M, N, 1, 1, {k: [0, 1, 1] for k in build_index_set(M, N) - {(0, 0), (0, N)}}),
                              strict=False).symbolic
            for (k, l), expr in sol.betas.items():
                i, j = j_to_i(k, l, M)
                if i >= 0 and mono_weight(i, j, M, N) == R:
                    assert not expr

    def test_violation_reports_second_derivative(self):
        with pytest.raises(GammaNonzero) as exc:
            solve_betas(painleve_22(alpha=CoeffPoly([0, 0, 0, 1])))
        res = exc.value.residue
        # residue is a constant multiple of alpha'' = 6 z
        assert res.degree == 1 and res.coeffs[0] == 0

    def test_non_strict_records_residue(self):
        aux = solve_betas(painleve_22(alpha=CoeffPoly([0, 0, 1])), strict=False)
        assert list(aux.gamma_residues) == [(-1, 2)]

    def test_division_by_zero(self):
        aux = solve_betas(painleve_22(beta=1))
        assert aux.betas
        with pytest.raises(ZeroDivisionError):
            eval_W(aux, 0.1, 0, 1)

    def test_json(self):
        js = solve_betas(painleve_22(beta=1, gamma=1)).to_json()
        assert js["M"] == 2 and js["gamma_residues"] == {}


class TestCertificate:
    @pytest.mark.parametrize("M,N", [(2, 2), (2, 3), (3, 3)])
    def test_identity_is_exact(self, M, N):
        eng = AuxEngine(M, N)
        assert eng.check_identity(eng.certificate()) == {}

    @pytest.mark.parametrize("M,N", [(2, 2), (2, 3), (3, 3), (2, 4)])
    def test_bounded_class(self, M, N):
        eng = AuxEngine(M, N)
        cert = eng.certificate()
        index = build_index_set(M, N)
        for part in (cert.P, cert.Q, cert.R):
            for a, b in part:
                assert (a, b) in index if a >= 0 else (-a) * (N + 1) - b * (M + 1) >= 0

    def test_numeric_identity(self):
        aux = solve_betas(branching_23())
        z, y1, y2 = 0.3 + 0.2j, 1.7 - 0.4j, -0.9 + 1.1j
        wp, P, G, Q, Rp = certificate_terms(aux, z, y1, y2)
        W = eval_W(aux, z, y1, y2)
        assert abs(wp - (P * W + G + Q + Rp)) < 1e-10 * max(1, abs(wp))


class TestSeriesCrossCheck:
    @pytest.mark.parametrize("make", [lambda: painleve_22(beta=0.5, gamma=-1), branching_23, branching_33])
    def test_W_converges_on_the_series(self, make):
        spec = make()
        aux = solve_betas(spec)
        dps = suggested_dps(spec, 16, 1e-3, guard=30)
        ser = numeric_series(spec, 0.4, K=16, dps=dps, free_params=[0.3])
        R = ser.ramification
        with mpmath.workdps(dps):
            vals = []
            for t in (mpmath.mpf("1e-1"), mpmath.mpf("1e-2"), mpmath.mpf("1e-3")):
                y1, y2 = ser.evaluate_t(t)
                vals.append(eval_W(aux, ser.base_point + t**R, y1, y2, dps))
            # no negative powers survive: successive values settle
            assert abs(vals[2] - vals[1]) < abs(vals[1] - vals[0])
            assert abs(vals[2] - vals[1]) < 1e-2 * max(1, abs(vals[2]))
