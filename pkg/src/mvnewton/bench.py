"""Experiment harness: accuracy, runtime scaling, Runge study, node quality.

Every experiment is seeded and returns plain records; the CLI turns them
into CSV.  Timings are excluded from the determinism contract, all sampled
points and coefficients are included.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SingularMatrixError
from .expressions import runge_function
from .indexing import count_coefficients
from .nodes import check_generating_nodes, generate_newton_nodes
from .polynomials import eval_monomial_many, eval_newton_many
from .solver import (MonomialPoly, NewtonPoly, _line_tables,
                     divided_differences_1d, invert_vandermonde, pip_solve,
                     solve_vandermonde_lu)

#: Euler-Mascheroni constant, for the 1D Chebyshev Lebesgue asymptotics.
EULER_GAMMA = 0.5772156649015329

#: Method tags accepted by the accuracy and runtime experiments.
METHODS = ("pip", "lu-cheb", "lu-random", "inversion")

#: Fixed CSV column order for benchmark records.
CSV_COLUMNS = ("method", "m", "n", "N", "trial", "seed", "time_s", "max_err")

RUNGE_CSV_COLUMNS = ("degree", "kind", "max_rel_err", "mean_rel_err")

LEBESGUE_CSV_COLUMNS = ("n", "kind", "lebesgue", "resolution")

BACKEND_CSV_COLUMNS = ("backend", "op", "m", "n", "N", "time_s")

#: Redraw attempts for random nodes before a trial is recorded as failed.
RANDOM_NODE_RETRIES = 3


@dataclass
class BenchRecord:
    """One measurement of one method on one trial."""

    method: str
    m: int
    n: int
    size: int
    trial: int
    seed: int
    time_s: float
    max_err: float

    def row(self):
        return (self.method, self.m, self.n, self.size, self.trial,
                self.seed, _fmt(self.time_s), _fmt(self.max_err))


@dataclass
class PowerLawFit:
    """Least-squares fit of the cost model prefactor * N**exponent."""

    prefactor: float
    exponent: float
    r_squared: float


@dataclass
class LebesgueEstimate:
    """Dense-grid estimate of a 1D Lebesgue constant."""

    degree: int
    kind: str
    value: float
    resolution: int


@dataclass
class RungeRecord:
    degree: int
    kind: str
    max_rel_err: float
    mean_rel_err: float

    def row(self):
        return (self.degree, self.kind, _fmt(self.max_rel_err),
                _fmt(self.mean_rel_err))


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def fit_power_law(sizes, times) -> PowerLawFit:
    """Ordinary least squares on (log N, log t).

    Requires at least 3 samples with strictly positive times.
    """
    sizes = np.asarray(sizes, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    if sizes.shape != times.shape or sizes.ndim != 1:
        raise ValueError("sizes and times must be equal-length 1D arrays")
    if sizes.size < 3:
        raise ValueError(f"power-law fit needs >= 3 samples, got {sizes.size}")
    if np.any(times <= 0.0) or np.any(sizes <= 0.0):
        raise ValueError("power-law fit needs positive sizes and times")
    log_n = np.log(sizes)
    log_t = np.log(times)
    slope, intercept = np.polyfit(log_n, log_t, 1)
    residual = log_t - (slope * log_n + intercept)
    ss_res = float(residual @ residual)
    centered = log_t - log_t.mean()
    ss_tot = float(centered @ centered)
    if ss_tot > 0.0:
        r_squared = 1.0 - ss_res / ss_tot
    else:
        r_squared = 1.0 if ss_res < 1e-20 else 0.0
    r_squared = min(1.0, max(0.0, r_squared))
    return PowerLawFit(prefactor=float(np.exp(intercept)),
                       exponent=float(slope), r_squared=r_squared)


def _validate_methods(methods):
    methods = tuple(methods)
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown methods {unknown}; choose from {METHODS}")
    return methods


def experiment_accuracy(m_values, n, trials, seed, methods=METHODS):
    """Coefficient-recovery errors for known random polynomials.

    Per (m, trial) one uniform [-1, 1] coefficient vector is drawn and
    shared by all methods: it defines a Newton-form polynomial for the
    divided-difference solver and a monomial-form polynomial for the
    matrix methods.  The polynomial is sampled at each method's nodes,
    recovered, and the max absolute coefficient error recorded.  Failed
    random-node trials record a NaN error instead of raising.
    """
    methods = _validate_methods(methods)
    records = []
    for m in m_values:
        size = count_coefficients(m, n)
        for trial in range(trials):
            rng = np.random.default_rng([seed, m, trial])
            coeffs = rng.uniform(-1.0, 1.0, size=size)
            node_rng = np.random.default_rng([seed, m, trial, 1])
            for method in methods:
                start = time.perf_counter()
                if method == "pip":
                    nodeset = generate_newton_nodes(m, n, "chebyshev")
                    truth = NewtonPoly(nodeset=nodeset, coefficients=coeffs)
                    values = eval_newton_many(truth, nodeset.nodes())
                    recovered = pip_solve(nodeset, values).coefficients
                elif method in ("lu-cheb", "inversion"):
                    nodeset = generate_newton_nodes(m, n, "chebyshev")
                    truth = MonomialPoly(m=m, n=n, coefficients=coeffs)
                    points = nodeset.nodes()
                    values = eval_monomial_many(truth, points)
                    if method == "lu-cheb":
                        recovered = solve_vandermonde_lu(points, values,
                                                         n).coefficients
                    else:
                        recovered = invert_vandermonde(points, n) @ values
                else:  # lu-random
                    truth = MonomialPoly(m=m, n=n, coefficients=coeffs)
                    recovered, _ = _random_solve_with_sampling(
                        node_rng, truth, size)
                elapsed = time.perf_counter() - start
                if recovered is None:
                    err = float("nan")
                else:
                    err = float(np.max(np.abs(recovered - coeffs)))
                records.append(BenchRecord(
                    method=method, m=m, n=n, size=size, trial=trial,
                    seed=seed, time_s=elapsed, max_err=err))
    return records


def _random_solve_with_sampling(rng, truth: MonomialPoly, size):
    """Draw random nodes, sample the known polynomial there, and recover.

    Redraws the nodes up to RANDOM_NODE_RETRIES times on singularity;
    returns (coefficients, elapsed), with None coefficients if every draw
    failed.
    """
    start = time.perf_counter()
    for _ in range(RANDOM_NODE_RETRIES):
        points = rng.uniform(-1.0, 1.0, size=(size, truth.m))
        values = eval_monomial_many(truth, points)
        try:
            poly = solve_vandermonde_lu(points, values, truth.n)
        except SingularMatrixError:
            continue
        return poly.coefficients, time.perf_counter() - start
    return None, time.perf_counter() - start


def _best_time(run, floor: float) -> float:
    """Per-call wall time, minimum over repeats.

    Calls shorter than ``floor`` are repeated until the floor is met; the
    minimum single-run time is reported, which suppresses scheduler and
    cache noise without hiding the real cost.
    """
    start = time.perf_counter()
    run()
    best = time.perf_counter() - start
    if best <= 0.0:
        return best
    if best >= 1.0:
        reps = 1  # long calls: one confirmation run, first-touch effects only
    else:
        reps = min(1000, max(2, math.ceil(floor / max(best, 1e-9))))
    for _ in range(reps):
        start = time.perf_counter()
        run()
        best = min(best, time.perf_counter() - start)
    return best


def experiment_runtime(m_values, n, trials, seed, methods=("pip", "lu-cheb"),
                       time_floor: float = 0.02):
    """Wall time to generate nodes and solve, per method plus power-law fits.

    Per (m, trial) one uniform [-1, 1] value vector is drawn and consumed
    identically by every method whose nodes coincide.  Methods are swept
    one after the other (not interleaved) so a heavyweight baseline does
    not perturb the next method's allocator and cache state; each point is
    the minimum over repeats (``time_floor``).  Returns (records, fits)
    where fits maps each method to its :class:`PowerLawFit`.
    """
    methods = _validate_methods(methods)
    records = []
    for method in methods:
        for m in m_values:
            size = count_coefficients(m, n)
            for trial in range(trials):
                rng = np.random.default_rng([seed, m, trial])
                values = rng.uniform(-1.0, 1.0, size=size)
                node_rng = np.random.default_rng([seed, m, trial, 1])
                if method == "pip":
                    def run():
                        nodeset = generate_newton_nodes(m, n, "chebyshev")
                        pip_solve(nodeset, values)
                elif method == "lu-cheb":
                    def run():
                        nodeset = generate_newton_nodes(m, n, "chebyshev")
                        solve_vandermonde_lu(nodeset.nodes(), values, n)
                elif method == "inversion":
                    def run():
                        nodeset = generate_newton_nodes(m, n, "chebyshev")
                        inverse = invert_vandermonde(nodeset.nodes(), n)
                        inverse @ values
                else:  # lu-random
                    def run():
                        _random_unisolvent_solve_values(node_rng, m, n, size,
                                                        values)
                elapsed = _best_time(run, time_floor)
                records.append(BenchRecord(
                    method=method, m=m, n=n, size=size, trial=trial,
                    seed=seed, time_s=elapsed, max_err=float("nan")))
    fits = {}
    for method in methods:
        chosen = [r for r in records if r.method == method]
        fits[method] = fit_power_law([r.size for r in chosen],
                                     [r.time_s for r in chosen])
    return records, fits


def _random_unisolvent_solve_values(rng, m, n, size, values):
    for _ in range(RANDOM_NODE_RETRIES):
        points = rng.uniform(-1.0, 1.0, size=(size, m))
        try:
            return solve_vandermonde_lu(points, values, n)
        except SingularMatrixError:
            continue
    return None


def experiment_runge(m, degrees, samples, seed):
    """Relative approximation error of the steep rational bump.

    Interpolates 1 / (1 + 25 ||x||^2) on Chebyshev and equidistant grids
    for each requested degree, then measures |Q(p) - f(p)| / f(p) over one
    fixed set of uniform random sample points.
    """
    rng = np.random.default_rng([seed, m])
    points = rng.uniform(-1.0, 1.0, size=(int(samples), m))
    f = runge_function(m)
    f_values = np.array([f(p) for p in points])
    rows = []
    for degree in degrees:
        for kind in ("chebyshev", "equidistant"):
            nodeset = generate_newton_nodes(m, degree, kind)
            node_points = nodeset.nodes()
            node_values = np.array([f(p) for p in node_points])
            poly = pip_solve(nodeset, node_values)
            approx = eval_newton_many(poly, points)
            rel = np.abs(approx - f_values) / f_values
            rows.append(RungeRecord(degree=degree, kind=kind,
                                    max_rel_err=float(rel.max()),
                                    mean_rel_err=float(rel.mean())))
    return rows


def estimate_lebesgue_1d(nodes, resolution: int,
                         kind: str = "custom") -> LebesgueEstimate:
    """Max of sum_j |L_j(x)| over a uniform grid on [-1, 1].

    The cardinal interpolants L_j come from 1D divided differences on
    indicator data; ``resolution`` must be at least 10 * (n + 1).
    """
    nodes = check_generating_nodes(nodes)
    count = nodes.size
    if resolution < 10 * count:
        raise ValueError(f"resolution {resolution} is below the minimum "
                         f"{10 * count} for {count} nodes")
    grid = np.linspace(-1.0, 1.0, int(resolution))
    total = np.zeros_like(grid)
    for j in range(count):
        data = np.zeros(count)
        data[j] = 1.0
        coeffs = divided_differences_1d(nodes, data)
        acc = np.full_like(grid, coeffs[-1])
        for k in range(count - 2, -1, -1):
            acc = coeffs[k] + (grid - nodes[k]) * acc
        total += np.abs(acc)
    return LebesgueEstimate(degree=count - 1, kind=kind,
                            value=float(total.max()),
                            resolution=int(resolution))


def chebyshev_lebesgue_asymptotic(n: int) -> float:
    """Asymptotic 1D Chebyshev Lebesgue constant (2/pi)(ln n + gamma + ln(8/pi))."""
    if n < 1:
        raise ValueError("asymptotic formula needs n >= 1")
    return (2.0 / math.pi) * (math.log(n) + EULER_GAMMA + math.log(8.0 / math.pi))


def experiment_backends(m, n, seed, eval_points: int = 400,
                        time_floor: float = 0.02):
    """Compare the compiled and pure-Python kernels on the hot paths.

    Times the divided-difference line sweep (one full solve's worth) and
    batched evaluation for every available backend.  Returns rows of
    (backend, op, m, n, N, time_s).
    """
    nodeset = generate_newton_nodes(m, n, "chebyshev")
    ls = nodeset.lower_set
    size = len(ls)
    rng = np.random.default_rng([seed, m, n])
    values = rng.uniform(-1.0, 1.0, size=size)
    points = rng.uniform(-1.0, 1.0, size=(eval_points, m))
    gens = nodeset.generator_matrix
    tables = [_line_tables(ls.exponents, d, None)
              for d in range(m - 1, -1, -1)]
    gen_rows = [np.ascontiguousarray(gens[d]) for d in range(m - 1, -1, -1)]
    tree_coeffs = np.ascontiguousarray(values[ls.tree_permutation])
    pts = np.ascontiguousarray(points)

    rows = []
    for name in _kernels.available_backends():
        impl = _kernels.backend_module(name)

        def run_sweep():
            work = values.copy()
            for (flat, starts), row in zip(tables, gen_rows):
                impl.dd_line_sweep(work, flat, starts, row)

        def run_eval():
            impl.eval_newton_batch(tree_coeffs, m, n, gens, pts)

        rows.append((name, "solve-sweep", m, n, size,
                     _best_time(run_sweep, time_floor)))
        rows.append((name, "eval-batch", m, n, size,
                     _best_time(run_eval, time_floor)))
    return rows


def write_records_csv(fp, records):
    """Benchmark records in the fixed column order."""
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in sorted(records, key=lambda r: (r.method, r.m, r.n, r.trial)):
        writer.writerow(record.row())


def write_runge_csv(fp, rows):
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(RUNGE_CSV_COLUMNS)
    for row in sorted(rows, key=lambda r: (r.degree, r.kind)):
        writer.writerow(row.row())


def write_lebesgue_csv(fp, estimates):
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(LEBESGUE_CSV_COLUMNS)
    for est in estimates:
        writer.writerow((est.degree, est.kind, _fmt(est.value),
                         est.resolution))


def write_backend_csv(fp, rows):
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(BACKEND_CSV_COLUMNS)
    for row in rows:
        writer.writerow(row[:5] + (_fmt(row[5]),))
