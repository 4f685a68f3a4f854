#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "rmt/edge_analysis.hpp"
#include "rmt/errors.hpp"
#include "rmt/finite_kernels.hpp"
#include "rmt/fredholm.hpp"
#include "rmt/montecarlo.hpp"
#include "rmt/quadrature.hpp"

using namespace rmt;

TEST_CASE("replica seeds are distinct and deterministic")
{
    CHECK(replica_seed(1, 0) == replica_seed(1, 0));
    CHECK(replica_seed(1, 0) != replica_seed(1, 1));
    CHECK(replica_seed(1, 0) != replica_seed(2, 0));
    CHECK(sample_eigenvalues({1.0, 2.0}, 5, 9, 3) == sample_eigenvalues({1.0, 2.0}, 5, 9, 3));
    CHECK(sample_eigenvalues({1.0, 2.0}, 5, 9, 3) != sample_eigenvalues({1.0, 2.0}, 5, 9, 4));
}

TEST_CASE("sampler input validation")
{
    CHECK_THROWS_AS(sample_eigenvalues({}, 5, 1), InvalidArgument);
    CHECK_THROWS_AS(sample_eigenvalues({1.0}, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(sample_eigenvalues({1.0, -1.0}, 3, 1), InvalidArgument);
    SimulationConfig c;
    c.lambdas = {1.0};
    c.N = 2;
    CHECK_THROWS_AS(simulate(c), InvalidArgument);
}

TEST_CASE("a single complex Gaussian has unit mean modulus squared")
{
    const int reps = 100000;
    double sum = 0.0;
    for (int r = 0; r < reps; ++r) {
        sum += sample_eigenvalues({1.0}, 1, 7, r)[0];
    }
    // |g|^2 is exponential with mean 1 and variance 1
    CHECK(std::abs(sum / reps - 1.0) < 4.0 / std::sqrt(reps));
}

TEST_CASE("trace identity and exact zeros")
{
    SimulationConfig c;
    c.mode = SimulationMode::global;
    c.N = 50;
    c.lambdas.assign(30, 2.0);
    c.reps = 2000;
    c.seed = 3;
    const SimulationRun run = simulate(c);
    CHECK(run.eigenvalues.size() == 50u * 2000u);
    CHECK(std::is_sorted(run.eigenvalues.begin(), run.eigenvalues.end()));
    for (int z : run.zero_counts) {
        CHECK(z == 20);
    }
    // E tr M = sum of the population eigenvalues = 60, and Var tr M = sum lambda^2 / N = 120 / 50
    const double mean_trace = std::accumulate(run.eigenvalues.begin(), run.eigenvalues.end(), 0.0) / c.reps;
    CHECK(std::abs(mean_trace - 60.0) < 4.0 * std::sqrt(120.0 / 50.0 / c.reps));

    SimulationConfig wide = c;
    wide.lambdas.assign(70, 1.0);
    wide.reps = 50;
    for (int z : simulate(wide).zero_counts) {
        CHECK(z == 0);
    }
}

TEST_CASE("simulation is deterministic for a given seed")
{
    SimulationConfig c;
    c.mode = SimulationMode::hard_edge;
    c.N = 20;
    c.lambdas.assign(21, 1.0);
    c.reps = 200;
    c.seed = 42;
    c.scale = 400.0 * 4.2;
    const SimulationRun a = simulate(c);
    const SimulationRun b = simulate(c);
    CHECK(a.smallest == b.smallest);
    c.seed = 43;
    CHECK(simulate(c).smallest != a.smallest);
}

TEST_CASE("survival estimates")
{
    SimulationRun run;
    run.smallest = {0.5, 1.5, 2.5, 3.5};
    const std::vector<SurvivalPoint> p = empirical_smallest_cdf(run, {0.0, 1.5, 4.0});
    REQUIRE(p.size() == 3);
    CHECK(p[0].survival == 1.0);
    CHECK(p[0].std_error == 0.0);
    CHECK(p[1].survival == 0.75);
    CHECK(p[1].std_error == doctest::Approx(std::sqrt(0.75 * 0.25 / 4.0)));
    CHECK(p[2].survival == 0.0);
    CHECK_THROWS_AS(empirical_smallest_cdf(SimulationRun{}, {1.0}), InvalidArgument);
}

TEST_CASE("Kolmogorov-Smirnov distance against a known law")
{
    const std::vector<double> grid = oracle::linear_grid(0.0, 1.0, 11);
    CHECK(ks_distance({0.25, 0.75}, grid, grid) == doctest::Approx(0.25));
    std::vector<double> u;
    for (int i = 0; i < 1000; ++i) {
        u.push_back((i + 0.5) / 1000.0);
    }
    CHECK(ks_distance(u, grid, grid) == doctest::Approx(0.0005));
    CHECK_THROWS_AS(ks_distance({}, grid, grid), InvalidArgument);
}

TEST_CASE("global law matches the limiting density at N = 400")
{
    // n = 140 keeps the 0.7 / 0.3 multiplicities integral
    const int N = 400;
    const int n = 140;
    const PopulationSpectrum f(oracle::two_atoms, static_cast<double>(n) / N, FiniteN{N, n});
    SimulationConfig c;
    c.mode = SimulationMode::global;
    c.N = N;
    c.lambdas = expand_population(f);
    c.reps = 20;
    c.seed = 11;
    const SimulationRun run = simulate(c);
    std::vector<double> positive;
    std::copy_if(run.eigenvalues.begin(), run.eigenvalues.end(), std::back_inserter(positive),
                 [](double x) { return x > 1e-10; });
    CHECK(positive.size() == static_cast<std::size_t>(n * c.reps));
    const DensityCurve dc = density_grid(PopulationSpectrum(oracle::two_atoms, oracle::cusp_gamma), 1e-4, 7.0, 7001);
    std::vector<double> cdf(dc.grid.size(), 0.0);
    for (std::size_t i = 1; i < cdf.size(); ++i) {
        cdf[i] = cdf[i - 1] + 0.5 * (dc.values[i] + dc.values[i - 1]) * (dc.grid[i] - dc.grid[i - 1]);
    }
    for (double& v : cdf) {
        v /= cdf.back();
    }
    CHECK(ks_distance(positive, dc.grid, cdf) < 0.02);
}

TEST_CASE("cusp counts agree with the integrated finite-N kernel")
{
    const PopulationSpectrum f(oracle::two_atoms, oracle::cusp_gamma);
    const TunedCusp t = tune_exact_cusp(f, 50, 1, TuneParameter::location);
    const FiniteCuspKernel k(CuspKernelIntegrand::from(t.spectrum, t.sequence), t.sequence.sigma_N);
    const QuadratureRule q = gauss_legendre(40, -1.0, 1.0);
    double expected = 0.0;
    for (int i = 0; i < q.order; ++i) {
        expected += q.weights[i] * k(q.nodes[i], q.nodes[i]);
    }
    SimulationConfig c;
    c.mode = SimulationMode::cusp;
    c.N = 50;
    c.lambdas = expand_population(t.spectrum);
    c.reps = 4000;
    c.seed = 5;
    c.scale = std::pow(50.0, 0.75) * t.sequence.sigma_N;
    c.center = t.sequence.a_N;
    c.window = 3.0;
    const SimulationRun run = simulate(c);
    const CountStatistics s = empirical_cusp_counts(run, -1.0, 1.0);
    CHECK(std::abs(s.mean - expected) < 4.0 * s.std_error);
    // determinantal counts are sub-Poissonian
    CHECK(s.variance < s.mean);
    CHECK(empirical_cusp_counts(run, 0.5, 0.5).mean == 0.0);
    CHECK_THROWS_AS(empirical_cusp_counts(run, -4.0, 1.0), InvalidArgument);
}

TEST_CASE("smallest eigenvalue survival follows the corrected hard-edge law" * doctest::test_suite("slow"))
{
    // alpha = 1 at N = 100 with 10^5 replicas: the 1/N corrected law fits within 3 standard errors
    const PopulationSpectrum id({{1.0, 1.0}}, 1.0);
    const int N = 100;
    const int alpha = 1;
    const HardEdgeConstants h = hard_edge(id, N, alpha);
    SimulationConfig c;
    c.mode = SimulationMode::hard_edge;
    c.N = N;
    c.lambdas.assign(N + alpha, 1.0);
    c.reps = 100000;
    c.seed = 1;
    c.scale = static_cast<double>(N) * N * h.sigma_N;
    const SimulationRun run = simulate(c);
    for (const SurvivalPoint& p : empirical_smallest_cdf(run, {1.0, 4.0})) {
        const HardEdgePrediction pred = hard_edge_terms(alpha, p.s, N, h.sigma_N, h.zeta_N);
        MESSAGE("s=" << p.s << " survival=" << p.survival << " prediction=" << pred.prediction << " F=" << pred.F
                     << " stderr=" << p.std_error);
        CHECK(std::abs(p.survival - pred.prediction) < 3.0 * p.std_error);
        CHECK(std::abs(p.survival - pred.prediction) < std::abs(p.survival - pred.F));
    }
}
