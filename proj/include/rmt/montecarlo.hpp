#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rmt/spectral_model.hpp"

namespace rmt {

// Seed of the generator used by replica `replica` of a run seeded with `seed`.
std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica);

// Eigenvalues, ascending, of (1/N) X diag(lambdas) X* with X an N x n standard complex Gaussian matrix.
std::vector<double> sample_eigenvalues(const std::vector<double>& lambdas, int N, std::uint64_t seed,
                                       std::uint64_t replica = 0);

// Population eigenvalues of a spectrum with finite_n data, each atom repeated by its multiplicity.
std::vector<double> expand_population(const PopulationSpectrum& spec);

enum class SimulationMode { hard_edge, cusp, global };

struct SimulationConfig {
    SimulationMode mode = SimulationMode::global;
    std::vector<double> lambdas;  // length n
    int N = 0;
    int reps = 0;
    std::uint64_t seed = 0;
    double scale = 1.0;    // hard edge: N^2 sigma_N; cusp: N^{3/4} sigma_N
    double center = 0.0;   // cusp: a_N
    double window = 10.0;  // cusp: keep rescaled eigenvalues with |x| <= window
};

struct SimulationRun {
    SimulationConfig config;
    int n = 0;
    std::vector<double> smallest;               // hard edge: scale * x_min per replica
    std::vector<std::vector<double>> rescaled;  // cusp: scale * (x_i - center) inside the window, per replica
    std::vector<double> eigenvalues;            // global: all eigenvalues of all replicas, ascending
    std::vector<int> zero_counts;               // eigenvalues below 1e-10 per replica
};

// Runs replicas concurrently; results depend only on the configuration.
SimulationRun simulate(const SimulationConfig& config);

struct SurvivalPoint {
    double s = 0.0;
    double survival = 0.0;  // fraction of replicas with scaled x_min >= s
    double std_error = 0.0;
};

std::vector<SurvivalPoint> empirical_smallest_cdf(const SimulationRun& run, const std::vector<double>& s_grid);

struct CountStatistics {
    double mean = 0.0;
    double std_error = 0.0;
    double variance = 0.0;
};

CountStatistics empirical_cusp_counts(const SimulationRun& run, double s, double t);

// Kolmogorov-Smirnov distance between sorted samples and the distribution function cdf.
double ks_distance(const std::vector<double>& sorted_samples, const std::vector<double>& grid,
                   const std::vector<double>& cdf);

}  // namespace rmt
