import io

import numpy as np
import pytest

from mvnewton.bench import (CSV_COLUMNS, chebyshev_lebesgue_asymptotic,
                            estimate_lebesgue_1d, experiment_accuracy,
                            experiment_backends, experiment_runge,
                            experiment_runtime, fit_power_law,
                            write_records_csv, write_runge_csv)
from mvnewton.nodes import chebyshev_1d, equidistant_1d, generate_newton_nodes
from mvnewton.solver import pip_solve, solve_vandermonde_lu


class TestFitPowerLaw:
    def test_exact_recovery(self):
        sizes = np.array([10.0, 40.0, 90.0, 250.0, 700.0])
        times = 2.0 * sizes ** 1.5
        fit = fit_power_law(sizes, times)
        assert fit.prefactor == pytest.approx(2.0, rel=1e-12)
        assert fit.exponent == pytest.approx(1.5, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_constant_times(self):
        fit = fit_power_law([10, 100, 1000], [0.5, 0.5, 0.5])
        assert fit.exponent == pytest.approx(0.0, abs=1e-12)
        assert 0.0 <= fit.r_squared <= 1.0

    def test_noisy_quadratic(self):
        rng = np.random.default_rng(12)
        sizes = np.geomspace(10, 10000, 25)
        times = 3.0 * sizes ** 2 * np.exp(rng.normal(0, 0.01, sizes.size))
        fit = fit_power_law(sizes, times)
        assert abs(fit.exponent - 2.0) < 0.05
        assert fit.r_squared > 0.99

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_power_law([1, 2], [1, 2])

    def test_nonpositive_times(self):
        with pytest.raises(ValueError):
            fit_power_law([1, 2, 3], [1.0, 0.0, 2.0])


class TestLebesgue:
    def test_two_nodes_gives_one(self):
        # cardinal functions (1-x)/2 and (1+x)/2: their |sum| is 1 on [-1,1]
        est = estimate_lebesgue_1d(np.array([-1.0, 1.0]), 500)
        assert est.value == pytest.approx(1.0, abs=1e-12)
        assert est.degree == 1

    def test_chebyshev_matches_asymptotics(self):
        est = estimate_lebesgue_1d(chebyshev_1d(10), 5000, kind="cheb")
        assert est.value == pytest.approx(chebyshev_lebesgue_asymptotic(10),
                                          rel=0.05)
        assert est.value == pytest.approx(2.43, rel=0.05)

    def test_equidistant_is_much_worse(self):
        cheb = estimate_lebesgue_1d(chebyshev_1d(20), 8000)
        equi = estimate_lebesgue_1d(equidistant_1d(20), 8000)
        assert equi.value > 10 * cheb.value

    def test_at_least_one(self):
        for n in (1, 3, 8):
            est = estimate_lebesgue_1d(chebyshev_1d(n), 200 * (n + 1))
            assert est.value >= 1.0 - 1e-12

    def test_resolution_guard(self):
        with pytest.raises(ValueError):
            estimate_lebesgue_1d(chebyshev_1d(10), 50)


class TestAccuracyExperiment:
    def test_zero_polynomial_recovered_exactly(self):
        ns = generate_newton_nodes(3, 2, "chebyshev")
        zeros = np.zeros(ns.node_count)
        assert np.all(pip_solve(ns, zeros).coefficients == 0.0)
        assert np.all(solve_vandermonde_lu(ns.nodes(), zeros).coefficients
                      == 0.0)

    def test_pip_error_near_machine_precision(self):
        records = experiment_accuracy([5], 3, trials=5, seed=123,
                                      methods=("pip",))
        assert len(records) == 5
        assert all(r.max_err <= 1e-10 for r in records)

    def test_random_nodes_less_accurate_in_median(self):
        records = experiment_accuracy([10], 3, trials=5, seed=7,
                                      methods=("pip", "lu-random"))
        pip_errs = [r.max_err for r in records if r.method == "pip"]
        rand_errs = [r.max_err for r in records if r.method == "lu-random"]
        assert np.nanmedian(rand_errs) >= np.nanmedian(pip_errs)

    def test_deterministic_across_runs_and_method_subsets(self):
        a = experiment_accuracy([3, 4], 2, trials=3, seed=99,
                                methods=("pip", "lu-cheb"))
        b = experiment_accuracy([3, 4], 2, trials=3, seed=99,
                                methods=("pip", "lu-cheb"))
        assert [r.max_err for r in a] == [r.max_err for r in b]
        # dropping a method does not shift the other methods' draws
        c = experiment_accuracy([3, 4], 2, trials=3, seed=99,
                                methods=("lu-cheb",))
        lu_a = [r.max_err for r in a if r.method == "lu-cheb"]
        assert [r.max_err for r in c] == lu_a

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            experiment_accuracy([2], 2, 1, 0, methods=("cholesky",))

    def test_csv_schema(self):
        records = experiment_accuracy([2], 2, trials=1, seed=0,
                                      methods=("pip",))
        buf = io.StringIO()
        write_records_csv(buf, records)
        lines = buf.getvalue().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 2


class TestRuntimeExperiment:
    def test_smoke_and_fits(self):
        records, fits = experiment_runtime([2, 3, 4], 2, trials=1, seed=5,
                                           methods=("pip", "lu-cheb"),
                                           time_floor=1e-4)
        assert set(fits) == {"pip", "lu-cheb"}
        assert len(records) == 6
        assert all(r.time_s > 0 for r in records)
        for fit in fits.values():
            assert 0.0 <= fit.r_squared <= 1.0


class TestRungeExperiment:
    def test_row_structure(self):
        rows = experiment_runge(2, [0, 2, 4], samples=50, seed=3)
        assert len(rows) == 6
        kinds = {(r.degree, r.kind) for r in rows}
        assert (0, "chebyshev") in kinds and (4, "equidistant") in kinds
        for r in rows:
            assert np.isfinite(r.max_rel_err) and r.max_rel_err >= 0
            assert r.max_rel_err >= r.mean_rel_err

    def test_deterministic(self):
        a = experiment_runge(2, [2, 4], samples=30, seed=11)
        b = experiment_runge(2, [2, 4], samples=30, seed=11)
        assert [(r.max_rel_err, r.mean_rel_err) for r in a] == \
               [(r.max_rel_err, r.mean_rel_err) for r in b]

    def test_csv(self):
        rows = experiment_runge(2, [2], samples=10, seed=0)
        buf = io.StringIO()
        write_runge_csv(buf, rows)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "degree,kind,max_rel_err,mean_rel_err"
        assert len(lines) == 3


class TestBackendsExperiment:
    def test_rows(self):
        rows = experiment_backends(3, 3, seed=0, eval_points=20,
                                   time_floor=1e-4)
        ops = {(r[0], r[1]) for r in rows}
        assert all(op in ("solve-sweep", "eval-batch") for _, op in ops)
        assert all(r[5] > 0 for r in rows)
