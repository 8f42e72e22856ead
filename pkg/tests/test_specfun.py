import mpmath
import pytest
from mpmath import mpc, mpf, workprec

from hypheat import auto, fixed, specfun
from hypheat.precision import AccuracyLossError, DomainError

POL = auto(1e-14)


def rel_err(got, want):
    return float(abs(got - want) / abs(want))


class TestGamma:
    def test_half(self):
        assert rel_err(specfun.gamma(0.5, POL), mpmath.sqrt(mpmath.pi)) < 1e-14

    def test_factorial(self):
        assert rel_err(specfun.gamma(5, POL), 24) < 1e-14

    def test_recurrence_oracle(self):
        # Gamma(2.5) = 1.5 * 0.5 * Gamma(0.5)
        want = mpf(3) / 4 * mpmath.sqrt(mpmath.pi)
        assert rel_err(specfun.gamma(2.5, POL), want) < 1e-14

    def test_contracted_accuracy_at_fixed_bits(self):
        pol = fixed(128)
        with workprec(256):
            for x in (0.3, 1.7, 12.5, 100.25):
                got = specfun.gamma(x, pol)
                want = mpmath.gamma(mpf(x))
                assert abs(got - want) / want < mpf(2) ** (-120)

    def test_domain(self):
        with pytest.raises(DomainError):
            specfun.gamma(0, POL)
        with pytest.raises(DomainError):
            specfun.gamma(-1.5, POL)


class TestGammaRatioSq:
    @pytest.mark.parametrize("p", [0.5, 1.0, 3.0])
    def test_nu_half_is_p_squared(self, p):
        # Gamma(ip+1) = ip Gamma(ip), so the ratio is exactly p^2
        got = specfun.gamma_ratio_sq(p, 0.5, POL)
        assert rel_err(got, mpf(p) ** 2) < 1e-12

    def test_nu_one_closed_form(self):
        # |Gamma(ip+3/2)/Gamma(ip)|^2 = p (p^2 + 1/4) tanh(pi p) by the
        # functional equation plus |Gamma(1/2+ip)|^2 = pi/cosh(pi p)
        for p in (0.5, 1.0, 2.5):
            want = mpf(p) * (mpf(p) ** 2 + mpf(1) / 4) * mpmath.tanh(mpmath.pi * p)
            assert rel_err(specfun.gamma_ratio_sq(p, 1.0, POL), want) < 1e-12

    def test_boundary_nu(self):
        # nu -> -1/2: the ratio tends to 1
        got = specfun.gamma_ratio_sq(1.0, -0.5 + 1e-9, POL)
        assert abs(got - 1) < 1e-7

    def test_against_complex_gamma_oracle(self):
        # independent oracle: mpmath's complex Gamma at elevated precision
        with workprec(200):
            want = (abs(mpmath.gamma(mpc(1.5, 1))) / abs(mpmath.gamma(mpc(0, 1)))) ** 2
        assert rel_err(specfun.gamma_ratio_sq(1.0, 1.0, POL), want) < 1e-13

    def test_p_zero_boundary(self):
        assert specfun.gamma_ratio_sq(0.0, 1.0, POL) == 0


class TestBesselK:
    @pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 3.0, 20.0])
    def test_half_order_closed_form(self, x):
        want = mpmath.sqrt(mpmath.pi / (2 * mpf(x))) * mpmath.exp(-mpf(x))
        assert rel_err(specfun.bessel_k(0.5, x, POL), want) < 1e-14

    def test_recurrence_oracle_5_halves(self):
        # K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu seeded at +-1/2
        x = mpf(1)
        k_half = mpmath.sqrt(mpmath.pi / (2 * x)) * mpmath.exp(-x)
        k_3half = k_half + (1 / x) * k_half
        k_5half = k_half + (3 / x) * k_3half
        assert rel_err(specfun.bessel_k(2.5, 1, POL), k_5half) < 1e-13

    def test_integral_order_against_refined_quadrature(self):
        got = specfun.bessel_k(0, 2, POL)
        finer = specfun.bessel_k(0, 2, auto(1e-22))
        assert rel_err(got, finer) < 1e-13
        assert rel_err(got, mpmath.besselk(0, 2)) < 1e-13

    @pytest.mark.parametrize("nu", [0.5, 1.5, 2.5, 3.5])
    @pytest.mark.parametrize("x", [0.1, 1.0, 20.0])
    def test_closed_form_matches_integral(self, nu, x):
        pol = fixed(128, 1e-14)
        a = specfun.bessel_k(nu, x, pol)
        b = specfun.bessel_k(nu, x, pol, method="integral")
        assert rel_err(a, b) < 1e-12

    def test_domain(self):
        with pytest.raises(DomainError):
            specfun.bessel_k(0.5, 0, POL)
        with pytest.raises(DomainError):
            specfun.bessel_k(0.5, -1, POL)


class TestBesselI:
    def test_at_zero(self):
        assert specfun.bessel_i(0, 0, POL) == 1
        assert specfun.bessel_i(0.5, 0, POL) == 0

    @pytest.mark.parametrize("x", [0.2, 1.0, 5.0])
    def test_half_order_closed_form(self, x):
        want = mpmath.sqrt(2 / (mpmath.pi * mpf(x))) * mpmath.sinh(mpf(x))
        assert rel_err(specfun.bessel_i(0.5, x, POL), want) < 1e-13

    def test_wronskian(self):
        # I_nu(x) K_{nu+1}(x) + I_{nu+1}(x) K_nu(x) = 1/x at (nu, x) = (0, 1)
        i0 = specfun.bessel_i(0, 1, POL)
        i1 = specfun.bessel_i(1, 1, POL)
        k0 = specfun.bessel_k(0, 1, POL)
        k1 = specfun.bessel_k(1, 1, POL)
        assert abs(i0 * k1 + i1 * k0 - 1) < 1e-13


class TestGauss2F1:
    def test_empty_series(self):
        assert specfun.gauss_2f1(1.3, -0.7, 2.2, 0, POL) == 1

    def test_quadratic_transformation(self):
        # 2F1(-2k, 2k; 1/2; (1-z)/2) = 2F1(-k, k; 1/2; 1-z^2) at k=2, z=0.7
        k, z = 2, mpf("0.7")
        lhs = specfun.gauss_2f1(-2 * k, 2 * k, 0.5, (1 - z) / 2, POL)
        rhs = specfun.gauss_2f1(-k, k, 0.5, 1 - z * z, POL)
        assert rel_err(lhs, rhs) < 1e-14

    def test_log_series_oracle(self):
        got = specfun.gauss_2f1(1, 1, 2, 0.5, POL)
        want = -mpmath.log(mpf(1) / 2) / mpf("0.5")
        assert rel_err(got, want) < 1e-14

    def test_pfaff_for_negative_argument(self):
        # 2F1(1, 1; 2; z) = -log(1-z)/z also for z <= -1
        for z in (-1.0, -3.0, -50.0):
            got = specfun.gauss_2f1(1, 1, 2, z, POL)
            want = -mpmath.log(1 - mpf(z)) / mpf(z)
            assert rel_err(got, want) < 1e-13

    def test_terminating_exact_rational(self):
        from fractions import Fraction

        a, b, c = -3, 2.5, 1.5
        z = Fraction(3, 10)
        acc = Fraction(1)
        term = Fraction(1)
        for j in range(3):
            term = term * Fraction(a + j) * (Fraction(5, 2) + j) / ((Fraction(3, 2) + j) * (j + 1)) * z
            acc += term
        got = specfun.gauss_2f1(a, b, c, 0.3, POL)
        want = mpf(acc.numerator) / acc.denominator
        assert rel_err(got, want) < 1e-15

    def test_domain(self):
        with pytest.raises(DomainError):
            specfun.gauss_2f1(1, 1, 2, 1.0, POL)
        with pytest.raises(DomainError):
            specfun.gauss_2f1(1, 1, -2, 0.5, POL)


class TestBesselPoly2F0:
    def test_k0(self):
        assert specfun.bessel_poly_2f0(0, 123.4) == 1

    def test_k1(self):
        assert specfun.bessel_poly_2f0(1, 0.3) == pytest.approx(0.7, abs=1e-15)

    def test_k3_pochhammer_oracle(self):
        def poch(v, j):
            out = 1.0
            for i in range(j):
                out *= v + i
            return out

        k, z = 3, 0.2
        want = sum(
            poch(-k, j) * poch(k, j) / mpmath.factorial(j) * z ** j for j in range(k + 1)
        )
        assert specfun.bessel_poly_2f0(k, z) == pytest.approx(float(want), rel=1e-14)

    def test_mpf_input(self):
        v = specfun.bessel_poly_2f0(2, mpf("0.25"))
        assert isinstance(v, mpf)


class TestChebyshev:
    def test_t2(self):
        assert specfun.chebyshev_T(2, 0.3) == pytest.approx(-0.82, abs=1e-15)

    def test_doubling_identity(self):
        k, x = 3, 1.4
        lhs = specfun.chebyshev_T(2 * k, x)
        rhs = specfun.chebyshev_T(k, 2 * x * x - 1)
        assert lhs == pytest.approx(rhs, rel=1e-13)

    def test_endpoint(self):
        assert specfun.chebyshev_T(7, 1.0) == pytest.approx(1.0, abs=1e-12)


class TestJacobiPhi:
    def test_at_origin(self):
        assert specfun.jacobi_phi(0.25, 3.0, 0, POL) == 1

    def test_nu_half_closed_form(self):
        # phi_p(r) = sin(p r) / (p sinh r) at nu = 1/2
        p, r = mpf(2), mpf(1)
        want = mpmath.sin(p * r) / (p * mpmath.sinh(r))
        got = specfun.jacobi_phi(0.5, 2, 1, POL)
        assert rel_err(got, want) < 1e-13

    def test_even_in_p(self):
        a = specfun.jacobi_phi(0.75, 2.5, 1.2, POL)
        b = specfun.jacobi_phi(0.75, -2.5, 1.2, POL)
        assert a == b

    def test_accuracy_loss_suggests_r_cap(self):
        with pytest.raises(AccuracyLossError) as exc:
            specfun.jacobi_phi(0.25, 1.0, 30.0, POL, max_terms=500)
        assert "r below" in str(exc.value)

    def test_eigenfunction_ode_residual(self):
        # Pin the eigenvalue at nu = 1/2 against sin(pr)/(p sinh r):
        # phi'' + (2 nu + 1) coth(r) phi' = -(p^2 + (2 nu + 1)^2 / 4) phi,
        # then check the residual across a (nu, p, r) grid by central
        # differences.
        with workprec(200):
            h = mpf(1) / 10000

            def residual(nu, p, r):
                r = mpf(r)
                pol = auto(1e-30)
                f0 = specfun.jacobi_phi(nu, p, r, pol)
                fp = specfun.jacobi_phi(nu, p, r + h, pol)
                fm = specfun.jacobi_phi(nu, p, r - h, pol)
                d2 = (fp - 2 * f0 + fm) / h ** 2
                d1 = (fp - fm) / (2 * h)
                lam = mpf(p) ** 2 + (2 * mpf(nu) + 1) ** 2 / 4
                return float(abs(d2 + (2 * nu + 1) / mpmath.tanh(r) * d1 + lam * f0))

            # calibration point: nu = 1/2 closed form fixes the constant
            p, r = mpf(2), mpf("0.9")
            closed = mpmath.sin(p * r) / (p * mpmath.sinh(r))
            got = specfun.jacobi_phi(0.5, 2, 0.9, auto(1e-30))
            assert rel_err(got, closed) < 1e-25
            assert residual(0.5, 2, 0.9) < 1e-6

            for nu in (0.25, 1.3):
                for p in (1.0, 3.0):
                    for r in (0.5, 1.0):
                        assert residual(nu, p, r) < 1e-6
