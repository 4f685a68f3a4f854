#include "rmt/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "rmt/errors.hpp"
#include "rmt/parallel.hpp"

namespace rmt {

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica)
{
    // splitmix64 finalizer over the pair
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (replica + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> sample_eigenvalues(const std::vector<double>& lambdas, int N, std::uint64_t seed,
                                       std::uint64_t replica)
{
    const int n = static_cast<int>(lambdas.size());
    if (N <= 0 || n <= 0) {
        throw InvalidArgument("sample_eigenvalues: need N > 0 and at least one population eigenvalue");
    }
    for (double l : lambdas) {
        if (!(l > 0.0) || !std::isfinite(l)) {
            throw InvalidArgument("sample_eigenvalues: population eigenvalues must be positive");
        }
    }
    std::mt19937_64 gen(replica_seed(seed, replica));
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    // Y = X diag(lambda)^{1/2} / sqrt(N), so that M = Y Y*
    Eigen::MatrixXcd Y(N, n);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));
    for (int j = 0; j < n; ++j) {
        const double s = std::sqrt(lambdas[j]) * inv_sqrt_n;
        for (int i = 0; i < N; ++i) {
            const double re = normal(gen);
            const double im = normal(gen);
            Y(i, j) = std::complex<double>(re * s, im * s);
        }
    }
    std::vector<double> out(N, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
    if (n < N) {
        // the N - n remaining eigenvalues are exactly zero
        solver.compute(Y.adjoint() * Y, Eigen::EigenvaluesOnly);
    } else {
        solver.compute(Y * Y.adjoint(), Eigen::EigenvaluesOnly);
    }
    if (solver.info() != Eigen::Success) {
        throw NumericalError("sample_eigenvalues: Hermitian eigendecomposition failed");
    }
    const Eigen::VectorXd& ev = solver.eigenvalues();
    const int offset = N - static_cast<int>(ev.size());
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        out[offset + k] = std::max(ev[k], 0.0);
    }
    return out;
}

std::vector<double> expand_population(const PopulationSpectrum& spec)
{
    const std::vector<int> mult = spec.multiplicities();
    std::vector<double> out;
    for (std::size_t j = 0; j < mult.size(); ++j) {
        out.insert(out.end(), mult[j], spec.atoms()[j].lambda);
    }
    return out;
}

SimulationRun simulate(const SimulationConfig& config)
{
    if (config.reps <= 0) {
        throw InvalidArgument("simulate: reps must be positive");
    }
    if (!(config.scale > 0.0) || !(config.window > 0.0)) {
        throw InvalidArgument("simulate: scale and window must be positive");
    }
    SimulationRun run;
    run.config = config;
    run.n = static_cast<int>(config.lambdas.size());
    const auto reps = static_cast<std::size_t>(config.reps);
    const int N = config.N;
    const std::size_t min_index = static_cast<std::size_t>(std::max(N - run.n, 0));
    run.zero_counts.assign(reps, 0);
    if (config.mode == SimulationMode::hard_edge) {
        run.smallest.assign(reps, 0.0);
    } else if (config.mode == SimulationMode::cusp) {
        run.rescaled.assign(reps, {});
    }
    std::vector<std::vector<double>> all(config.mode == SimulationMode::global ? reps : 0);
    parallel_for(reps, [&](std::size_t r) {
        std::vector<double> ev = sample_eigenvalues(config.lambdas, N, config.seed, r);
        run.zero_counts[r] = static_cast<int>(std::count_if(ev.begin(), ev.end(), [](double x) { return x < 1e-10; }));
        switch (config.mode) {
        case SimulationMode::hard_edge:
            run.smallest[r] = config.scale * ev[min_index];
            break;
        case SimulationMode::cusp:
            for (double x : ev) {
                const double u = config.scale * (x - config.center);
                if (std::abs(u) <= config.window) {
                    run.rescaled[r].push_back(u);
                }
            }
            break;
        case SimulationMode::global:
            all[r] = std::move(ev);
            break;
        }
    });
    if (config.mode == SimulationMode::global) {
        for (const auto& ev : all) {
            run.eigenvalues.insert(run.eigenvalues.end(), ev.begin(), ev.end());
        }
        std::sort(run.eigenvalues.begin(), run.eigenvalues.end());
    }
    return run;
}

std::vector<SurvivalPoint> empirical_smallest_cdf(const SimulationRun& run, const std::vector<double>& s_grid)
{
    if (run.smallest.empty()) {
        throw InvalidArgument("empirical_smallest_cdf: run has no smallest-eigenvalue samples");
    }
    std::vector<double> sorted = run.smallest;
    std::sort(sorted.begin(), sorted.end());
    const double total = static_cast<double>(sorted.size());
    std::vector<SurvivalPoint> out;
    for (double s : s_grid) {
        const auto below = std::lower_bound(sorted.begin(), sorted.end(), s) - sorted.begin();
        SurvivalPoint p;
        p.s = s;
        p.survival = (total - static_cast<double>(below)) / total;
        p.std_error = std::sqrt(p.survival * (1.0 - p.survival) / total);
        out.push_back(p);
    }
    return out;
}

CountStatistics empirical_cusp_counts(const SimulationRun& run, double s, double t)
{
    if (run.config.mode != SimulationMode::cusp) {
        throw InvalidArgument("empirical_cusp_counts: run was not made in cusp mode");
    }
    if (s > t || std::max(std::abs(s), std::abs(t)) > run.config.window) {
        throw InvalidArgument("empirical_cusp_counts: window must satisfy s <= t inside the recorded range");
    }
    CountStatistics c;
    const double reps = static_cast<double>(run.rescaled.size());
    std::vector<double> counts;
    for (const auto& r : run.rescaled) {
        counts.push_back(static_cast<double>(std::count_if(r.begin(), r.end(), [&](double u) {
            return s < t && u >= s && u <= t;
        })));
    }
    for (double k : counts) {
        c.mean += k;
    }
    c.mean /= reps;
    for (double k : counts) {
        c.variance += (k - c.mean) * (k - c.mean);
    }
    c.variance = reps > 1.0 ? c.variance / (reps - 1.0) : 0.0;
    c.std_error = std::sqrt(c.variance / reps);
    return c;
}

double ks_distance(const std::vector<double>& sorted_samples, const std::vector<double>& grid,
                   const std::vector<double>& cdf)
{
    if (grid.size() != cdf.size() || grid.size() < 2 || sorted_samples.empty()) {
        throw InvalidArgument("ks_distance: need matching grid and cdf and at least one sample");
    }
    auto F = [&](double x) {
        if (x <= grid.front()) {
            return cdf.front();
        }
        if (x >= grid.back()) {
            return cdf.back();
        }
        const auto k = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), x) - grid.begin());
        const double u = (x - grid[k - 1]) / (grid[k] - grid[k - 1]);
        return cdf[k - 1] + u * (cdf[k] - cdf[k - 1]);
    };
    const double n = static_cast<double>(sorted_samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
        const double f = F(sorted_samples[i]);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

}  // namespace rmt
