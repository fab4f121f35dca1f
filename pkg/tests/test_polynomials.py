import numpy as np
import pytest

from mvnewton.nodes import AffineMap, generate_newton_nodes
from mvnewton.polynomials import (Box, eval_basis, eval_monomial,
                                  eval_monomial_many, eval_newton,
                                  eval_newton_many, eval_read_count, gradient,
                                  integrate_hypercube, newton_to_monomial,
                                  partial_derivative)
from mvnewton.solver import MonomialPoly, NewtonPoly, pip_solve


def naive_newton_eval(poly, x):
    """Oracle: expand every basis term factor by factor and sum."""
    ls = poly.nodeset.lower_set
    gens = poly.nodeset.generators
    total = 0.0
    for position, alpha in enumerate(ls):
        term = poly.coefficients[position]
        for d in range(poly.m):
            for j in range(alpha[d]):
                term *= x[d] - gens[d][j]
        total += term
    return total


def analytic_monomial_integral(poly: MonomialPoly, box: Box) -> float:
    """Oracle: integrate the monomial form term by term."""
    total = 0.0
    for position, alpha in enumerate(poly.lower_set):
        term = poly.coefficients[position]
        for d in range(poly.m):
            k = alpha[d] + 1
            term *= (box.highs[d] ** k - box.lows[d] ** k) / k
        total += term
    return total


def interpolant_of(f, m, n, kind="chebyshev"):
    ns = generate_newton_nodes(m, n, kind)
    values = np.array([f(p) for p in ns.nodes()])
    return pip_solve(ns, values)


class TestEvalNewton:
    def test_constant(self):
        ns = generate_newton_nodes(3, 2, "chebyshev")
        coeffs = np.zeros(ns.node_count)
        coeffs[0] = 7.0
        poly = NewtonPoly(nodeset=ns, coefficients=coeffs)
        for x in ([0, 0, 0], [5, -3, 2], [0.1, 0.2, 0.3]):
            assert eval_newton(poly, x) == 7.0

    def test_linear_example(self):
        poly = interpolant_of(lambda p: p[0] + 2 * p[1], 2, 2)
        assert eval_newton(poly, [0.3, 0.4]) == pytest.approx(1.1, abs=1e-14)

    def test_matches_naive_expansion(self):
        rng = np.random.default_rng(31)
        ns = generate_newton_nodes(3, 4, "chebyshev")
        poly = NewtonPoly(nodeset=ns,
                          coefficients=rng.uniform(-1, 1, ns.node_count))
        for x in rng.uniform(-1, 1, size=(20, 3)):
            assert eval_newton(poly, x) == pytest.approx(
                naive_newton_eval(poly, x), abs=1e-12)

    def test_linearity(self):
        rng = np.random.default_rng(32)
        ns = generate_newton_nodes(2, 3, "chebyshev")
        c1 = rng.uniform(-1, 1, ns.node_count)
        c2 = rng.uniform(-1, 1, ns.node_count)
        a, b = rng.uniform(-2, 2, size=2)
        combo = NewtonPoly(nodeset=ns, coefficients=a * c1 + b * c2)
        p1 = NewtonPoly(nodeset=ns, coefficients=c1)
        p2 = NewtonPoly(nodeset=ns, coefficients=c2)
        for x in rng.uniform(-1, 1, size=(25, 2)):
            combined = a * eval_newton(p1, x) + b * eval_newton(p2, x)
            assert eval_newton(combo, x) == pytest.approx(combined, abs=1e-12)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(33)
        ns = generate_newton_nodes(2, 5, "chebyshev")
        poly = NewtonPoly(nodeset=ns,
                          coefficients=rng.uniform(-1, 1, ns.node_count))
        pts = rng.uniform(-1, 1, size=(17, 2))
        batch = eval_newton_many(poly, pts)
        singles = [eval_newton(poly, p) for p in pts]
        np.testing.assert_array_equal(batch, singles)

    def test_dimension_mismatch(self):
        poly = interpolant_of(lambda p: p[0], 2, 1)
        with pytest.raises(ValueError):
            eval_newton(poly, [0.1, 0.2, 0.3])

    @pytest.mark.parametrize("m,n", [(1, 4), (2, 3), (3, 2), (4, 4)])
    def test_coefficient_reads_exactly_n(self, m, n):
        ns = generate_newton_nodes(m, n, "chebyshev")
        poly = NewtonPoly(nodeset=ns, coefficients=np.ones(ns.node_count))
        assert eval_read_count(poly, np.zeros(m)) == ns.node_count

    def test_affine_composes_inverse(self):
        rng = np.random.default_rng(34)
        a = rng.normal(size=(2, 2)) + 2 * np.eye(2)
        tau = AffineMap(a, rng.normal(size=2))
        plain = generate_newton_nodes(2, 3, "chebyshev")
        moved = generate_newton_nodes(2, 3, "chebyshev", affine=tau)
        coeffs = rng.uniform(-1, 1, plain.node_count)
        poly_plain = NewtonPoly(nodeset=plain, coefficients=coeffs)
        poly_moved = NewtonPoly(nodeset=moved, coefficients=coeffs)
        for x in rng.uniform(-1, 1, size=(10, 2)):
            assert eval_newton(poly_moved, tau.apply(x)) == pytest.approx(
                eval_newton(poly_plain, x), abs=1e-12)


class TestPartialDerivative:
    def test_product_function(self):
        poly = interpolant_of(lambda p: p[0] * p[1], 2, 2)
        assert partial_derivative(poly, 1, [2.0, 3.0]) == pytest.approx(
            3.0, abs=1e-12)
        assert partial_derivative(poly, 2, [2.0, 3.0]) == pytest.approx(
            2.0, abs=1e-12)

    def test_constant_derivative_zero(self):
        poly = interpolant_of(lambda p: 4.5, 2, 3)
        assert partial_derivative(poly, 1, [0.3, -0.8]) == pytest.approx(
            0.0, abs=1e-12)

    def test_against_central_differences(self):
        rng = np.random.default_rng(35)
        ns = generate_newton_nodes(3, 5, "chebyshev")
        poly = NewtonPoly(nodeset=ns,
                          coefficients=rng.uniform(-1, 1, ns.node_count))
        h = 1e-5
        for _ in range(100):
            x = rng.uniform(-1, 1, size=3)
            i = int(rng.integers(1, 4))
            exact = partial_derivative(poly, i, x)
            step = np.zeros(3)
            step[i - 1] = h
            approx = (eval_newton(poly, x + step)
                      - eval_newton(poly, x - step)) / (2 * h)
            assert abs(approx - exact) <= 1e-6 * max(1.0, abs(exact))

    def test_gradient_shape(self):
        poly = interpolant_of(lambda p: p[0] ** 2 + 3 * p[1], 2, 2)
        grad = gradient(poly, [0.5, 0.5])
        np.testing.assert_allclose(grad, [1.0, 3.0], atol=1e-12)

    def test_bad_dimension_index(self):
        poly = interpolant_of(lambda p: p[0], 2, 1)
        with pytest.raises(ValueError):
            partial_derivative(poly, 0, [0, 0])
        with pytest.raises(ValueError):
            partial_derivative(poly, 3, [0, 0])

    def test_affine_chain_rule(self):
        rng = np.random.default_rng(36)
        a = rng.normal(size=(2, 2)) + 2 * np.eye(2)
        tau = AffineMap(a, rng.normal(size=2))
        moved = generate_newton_nodes(2, 3, "chebyshev", affine=tau)
        poly = NewtonPoly(
            nodeset=moved,
            coefficients=rng.uniform(-1, 1, moved.node_count))
        h = 1e-6
        x = np.array([0.3, -0.2])
        for i in (1, 2):
            step = np.zeros(2)
            step[i - 1] = h
            fd = (eval_newton(poly, x + step)
                  - eval_newton(poly, x - step)) / (2 * h)
            assert partial_derivative(poly, i, x) == pytest.approx(fd,
                                                                   abs=1e-6)


class TestIntegration:
    def test_sum_of_squares(self):
        poly = interpolant_of(lambda p: p[0] ** 2 + p[1] ** 2, 2, 2)
        assert integrate_hypercube(poly, Box.cube(2)) == pytest.approx(
            8.0 / 3.0, abs=1e-13)

    def test_unit_function_over_shifted_cube(self):
        poly = interpolant_of(lambda p: 1.0, 3, 2)
        box = Box.cube(3, 0.0, 2.0)
        assert integrate_hypercube(poly, box) == pytest.approx(8.0, abs=1e-12)

    def test_against_monomial_oracle(self):
        rng = np.random.default_rng(37)
        ns = generate_newton_nodes(2, 4, "chebyshev")
        poly = NewtonPoly(nodeset=ns,
                          coefficients=rng.uniform(-1, 1, ns.node_count))
        box = Box(np.array([-0.7, 0.1]), np.array([0.9, 1.3]))
        mono = newton_to_monomial(poly)
        assert integrate_hypercube(poly, box) == pytest.approx(
            analytic_monomial_integral(mono, box), abs=1e-11)

    def test_noncanonical_rejected(self):
        tau = AffineMap(2 * np.eye(2), np.zeros(2))
        ns = generate_newton_nodes(2, 2, "chebyshev", affine=tau)
        poly = NewtonPoly(nodeset=ns, coefficients=np.zeros(ns.node_count))
        with pytest.raises(ValueError, match="canonical"):
            integrate_hypercube(poly, Box.cube(2))

    def test_box_validation(self):
        with pytest.raises(ValueError):
            Box(np.array([0.0, 0.0]), np.array([1.0, 0.0]))
        with pytest.raises(ValueError):
            Box(np.array([0.0]), np.array([1.0, 2.0]))

    def test_box_dimension_mismatch(self):
        poly = interpolant_of(lambda p: 1.0, 2, 1)
        with pytest.raises(ValueError):
            integrate_hypercube(poly, Box.cube(3))

    def test_upper_limit_derivative_consistency(self):
        # d/db1 of the integral equals the 1D integral of the restriction
        rng = np.random.default_rng(38)
        ns = generate_newton_nodes(2, 4, "chebyshev")
        poly = NewtonPoly(nodeset=ns,
                          coefficients=rng.uniform(-1, 1, ns.node_count))
        a2, b2 = -0.6, 0.8
        b1 = 0.4
        h = 1e-6

        def integral(upper):
            box = Box(np.array([-0.9, a2]), np.array([upper, b2]))
            return integrate_hypercube(poly, box)

        fd = (integral(b1 + h) - integral(b1 - h)) / (2 * h)
        ts, ws = np.polynomial.legendre.leggauss(6)
        ts = a2 + (b2 - a2) * (ts + 1) / 2
        restricted = sum(w * eval_newton(poly, [b1, t])
                         for t, w in zip(ts, ws)) * (b2 - a2) / 2
        assert fd == pytest.approx(restricted, abs=1e-6)


class TestConversion:
    def test_1d_example(self):
        ns = generate_newton_nodes(1, 2, kind=[np.array([0.0, 1.0, 2.0])])
        poly = NewtonPoly(nodeset=ns, coefficients=np.array([0.0, 1.0, 1.0]))
        mono = newton_to_monomial(poly)
        np.testing.assert_allclose(mono.coefficients, [0.0, 0.0, 1.0],
                                   atol=1e-15)

    def test_constant(self):
        ns = generate_newton_nodes(3, 2, "chebyshev")
        coeffs = np.zeros(ns.node_count)
        coeffs[0] = -2.5
        mono = newton_to_monomial(NewtonPoly(nodeset=ns, coefficients=coeffs))
        expected = np.zeros(ns.node_count)
        expected[0] = -2.5
        np.testing.assert_allclose(mono.coefficients, expected, atol=1e-15)

    def test_cross_evaluation(self):
        rng = np.random.default_rng(39)
        ns = generate_newton_nodes(3, 3, "chebyshev")
        poly = NewtonPoly(nodeset=ns,
                          coefficients=rng.uniform(-1, 1, ns.node_count))
        mono = newton_to_monomial(poly)
        pts = rng.uniform(-1, 1, size=(200, 3))
        np.testing.assert_allclose(eval_monomial_many(mono, pts),
                                   eval_newton_many(poly, pts), atol=1e-9)

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_interpolation_loop_reproduces_monomials(self, m, n):
        rng = np.random.default_rng(m * 10 + n)
        ns = generate_newton_nodes(m, n, "chebyshev")
        truth = MonomialPoly(m=m, n=n,
                             coefficients=rng.uniform(-1, 1, ns.node_count))
        values = eval_monomial_many(truth, ns.nodes())
        recovered = newton_to_monomial(pip_solve(ns, values))
        np.testing.assert_allclose(recovered.coefficients, truth.coefficients,
                                   atol=1e-10)

    def test_noncanonical_rejected(self):
        tau = AffineMap(2 * np.eye(2), np.zeros(2))
        ns = generate_newton_nodes(2, 2, "chebyshev", affine=tau)
        poly = NewtonPoly(nodeset=ns, coefficients=np.zeros(ns.node_count))
        with pytest.raises(ValueError, match="canonical"):
            newton_to_monomial(poly)


class TestEvalMonomial:
    def test_square(self):
        poly = MonomialPoly(m=1, n=2, coefficients=[0.0, 0.0, 1.0])
        assert eval_monomial(poly, [3.0]) == 9.0

    def test_zero_polynomial(self):
        poly = MonomialPoly(m=2, n=2, coefficients=np.zeros(6))
        assert eval_monomial(poly, [0.4, -0.7]) == 0.0

    def test_dimension_mismatch(self):
        poly = MonomialPoly(m=2, n=1, coefficients=np.zeros(3))
        with pytest.raises(ValueError):
            eval_monomial(poly, [1.0])


class TestEvalBasis:
    def test_zero_index_is_one(self):
        ns = generate_newton_nodes(3, 2, "chebyshev")
        for x in ([0, 0, 0], [9, 9, 9]):
            assert eval_basis(ns, (0, 0, 0), x) == 1.0

    def test_1d_quadratic_factor(self):
        ns = generate_newton_nodes(1, 2, kind=[np.array([0.0, 1.0, 0.5])])
        assert eval_basis(ns, (2,), [2.0]) == 2.0  # x(x-1) at 2

    def test_exact_triangularity(self):
        ns = generate_newton_nodes(3, 3, "chebyshev")
        ls = ns.lower_set
        for alpha in ls:
            for beta in ls:
                value = eval_basis(ns, alpha, ns.node_for(beta))
                dominated = all(a <= b for a, b in zip(alpha, beta))
                if dominated:
                    if alpha == beta:
                        assert value != 0.0
                else:
                    assert value == 0.0  # exact zero, not merely small

    def test_membership_check(self):
        ns = generate_newton_nodes(2, 2, "chebyshev")
        with pytest.raises(ValueError):
            eval_basis(ns, (3, 0), [0.0, 0.0])
