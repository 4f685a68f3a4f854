#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace rmt {

using cplx = std::complex<double>;

struct Atom {
    double lambda = 0.0;
    double weight = 0.0;
};

struct FiniteN {
    int N = 0;
    int n = 0;
};

// Atomic population spectrum nu = sum_j w_j delta_{lambda_j} with aspect ratio gamma.
// When finite_n is present, the finite-N variant uses n/N in place of gamma.
class PopulationSpectrum {
public:
    PopulationSpectrum(std::vector<Atom> atoms, double gamma,
                       std::optional<FiniteN> finite_n = std::nullopt);

    const std::vector<Atom>& atoms() const { return atoms_; }
    double gamma() const { return gamma_; }
    const std::optional<FiniteN>& finite_n() const { return finite_n_; }

    // gamma, or n/N in finite-N mode (throws if finite_n is absent).
    double aspect_ratio(bool finite_n_mode) const;

    // Integer atom multiplicities n_j = w_j n; throws unless every w_j n is an integer.
    std::vector<int> multiplicities() const;

    // The points 1/lambda_j in increasing order.
    std::vector<double> poles() const;

    // Same atoms, different gamma / finite-N data.
    PopulationSpectrum with_gamma(double gamma) const;
    PopulationSpectrum with_finite_n(std::optional<FiniteN> finite_n) const;

private:
    std::vector<Atom> atoms_;
    double gamma_;
    std::optional<FiniteN> finite_n_;
};

// Derivative of order `order` (0..5) of g(m) = 1/m + gamma sum_j w_j lambda_j / (1 - m lambda_j).
cplx g_eval(const PopulationSpectrum& spec, cplx m, int order, bool finite_n_mode = false);
double g_eval(const PopulationSpectrum& spec, double m, int order, bool finite_n_mode = false);

struct StieltjesValue {
    cplx z;
    cplx m;
    double residual = 0.0;
};

// Stieltjes transform m(z), z in the closed upper half plane, z != 0.
StieltjesValue solve_stieltjes(const PopulationSpectrum& spec, cplx z, bool finite_n_mode = false);

double density(const PopulationSpectrum& spec, double x, bool finite_n_mode = false);

struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> values;
    double mass_at_zero = 0.0;
};

DensityCurve density_grid(const PopulationSpectrum& spec, double x_min, double x_max, int n_points,
                          bool finite_n_mode = false);

struct ScanOptions {
    int points_per_interval = 2048;
};

// A real zero of g' in D. double_root marks a zero where g' touches 0 without changing sign.
struct CriticalRoot {
    double m = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
    bool double_root = false;
};

std::vector<CriticalRoot> critical_roots(const PopulationSpectrum& spec, const ScanOptions& options,
                                         bool finite_n_mode, std::vector<std::string>* warnings);

struct SupportInterval {
    double left = 0.0;
    double right = 0.0;
    // Critical points of g mapping to the endpoints; NaN for the hard edge at 0.
    double left_preimage = 0.0;
    double right_preimage = 0.0;
};

struct SupportDescription {
    std::vector<SupportInterval> intervals;
    std::vector<double> preimages;
    bool hard_edge = false;
    std::vector<std::string> warnings;
};

SupportDescription support(const PopulationSpectrum& spec, const ScanOptions& options = {},
                           bool finite_n_mode = false);

}  // namespace rmt
