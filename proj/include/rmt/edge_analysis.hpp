#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmt/spectral_model.hpp"

namespace rmt {

enum class CriticalKind { soft_edge, cusp_candidate };

struct CriticalPoint {
    double m = 0.0;
    CriticalKind kind = CriticalKind::soft_edge;
    double g2 = 0.0;
    double g3 = 0.0;
};

struct CriticalPointScan {
    std::vector<CriticalPoint> points;
    std::vector<std::string> warnings;
};

CriticalPointScan find_critical_points(const PopulationSpectrum& spec, const ScanOptions& options = {},
                                       bool finite_n_mode = false);

struct CuspDescriptor {
    double a = 0.0;
    double c = 0.0;
    double g3 = 0.0;
    double sigma_limit = 0.0;
    double cube_root_coeff = 0.0;
    std::optional<double> kappa;
    std::optional<double> tau;
    double pole_distance = 0.0;
    bool regular = false;
};

// Descriptor of the cusp with preimage c; c must be a double zero of g'.
CuspDescriptor classify_cusp(const PopulationSpectrum& spec, double c, bool finite_n_mode = false);

enum class EdgeSide { left, right };

struct SoftEdgeDescriptor {
    double a = 0.0;
    double c = 0.0;
    double g2 = 0.0;
    EdgeSide side = EdgeSide::left;
    // (1/pi) (2/|g''(c)|)^{1/2}, the square-root law coefficient
    double sqrt_coeff = 0.0;
};

std::vector<SoftEdgeDescriptor> soft_edges(const PopulationSpectrum& spec, const ScanOptions& options = {},
                                           bool finite_n_mode = false);

struct HardEdgeConstants {
    bool present = false;
    double g1_inf = 0.0;
    double g2_inf = 0.0;
    double blowup_coeff = 0.0;
    double sigma_N = 0.0;
    double zeta_N = 0.0;
    int N = 0;
    int alpha = 0;
};

// Hard-edge data; sigma_N and zeta_N use n = N + alpha population eigenvalues distributed as nu.
HardEdgeConstants hard_edge(const PopulationSpectrum& spec, int N, int alpha);

struct FiniteNCuspSequence {
    int N = 0;
    double c_N = 0.0;
    double a_N = 0.0;
    double sigma_N = 0.0;
    double kappa_N = 0.0;
    double g2_residual = 0.0;
    double g3_N = 0.0;
};

FiniteNCuspSequence finite_n_cusp(const PopulationSpectrum& spec, double c_seed);

// Copies kappa_N into the descriptor and sets tau = -kappa (6/g3)^{1/2}.
void attach_finite_n(CuspDescriptor& cusp, const FiniteNCuspSequence& seq);

enum class TuneParameter {
    weight,    // adjust one atom's weight, rescale the rest
    location,  // adjust one atom's location; integer multiplicities kept
};

struct TunedCusp {
    PopulationSpectrum spectrum;
    FiniteNCuspSequence sequence;
    double residual_g1 = 0.0;
    double residual_g2 = 0.0;
};

// Solves g_N'(c_N) = g_N''(c_N) = 0 at size N by 2D Newton on (parameter of atom_index, c_N).
TunedCusp tune_exact_cusp(const PopulationSpectrum& templ, int N, std::size_t atom_index,
                          TuneParameter parameter = TuneParameter::weight);

struct ExactCusp {
    double gamma = 0.0;
    double c = 0.0;
};

// The aspect ratio at which the given atoms produce an exact cusp with preimage in the pole gap
// containing c_seed.
ExactCusp exact_cusp_gamma(const std::vector<Atom>& atoms, double c_seed);

}  // namespace rmt
