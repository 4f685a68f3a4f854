#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "rmt/contour.hpp"
#include "rmt/edge_analysis.hpp"
#include "rmt/spectral_model.hpp"

namespace rmt {

// Population eigenvalues of Sigma_N as distinct values with multiplicities, plus cusp data.
struct CuspKernelIntegrand {
    std::vector<double> lambdas;
    std::vector<int> multiplicity;
    int N = 0;
    int n = 0;
    double c_N = 0.0;
    double a_N = 0.0;
    double q = 0.0;

    static CuspKernelIntegrand from(const PopulationSpectrum& spec, const FiniteNCuspSequence& seq);
    void validate() const;
};

enum class CuspContourStrategy {
    saddle,   // local Pearcey-scale pieces continued along steepest paths of Re f_N
    circles,  // circles around the pole clusters and the origin; loses digits quickly as N grows
};

struct CuspContourOptions {
    CuspContourStrategy strategy = CuspContourStrategy::saddle;
    int panel_nodes = 8;     // Gauss-Legendre nodes per traced segment
    int local_nodes = 32;    // nodes on the local arcs and the local vertical segment
    double box = 3.0;        // |x|, |y| range the truncation is designed for
    double cutoff = 40.0;    // stop tracing once the integrand is below e^{-cutoff}
    double gamma_margin = 0.25;
    double theta_radius = 0.0;  // circles only; 0 picks a radius between the clusters
    int circle_nodes = 256;
};

// Scaled finite-N kernel N^{-3/4} sigma_N^{-1} K_N(a_N + x/(N^{3/4} sigma_N), a_N + y/(N^{3/4} sigma_N)).
class FiniteCuspKernel {
public:
    FiniteCuspKernel(const CuspKernelIntegrand& integrand, double sigma_N, const CuspContourOptions& options = {});

    double operator()(double x, double y) const;
    Eigen::MatrixXd matrix(const std::vector<double>& xs, const std::vector<double>& ys) const;
    double last_imag_residue() const { return imag_residue_; }

    // Same kernel with every node count doubled.
    FiniteCuspKernel refined() const;

    // Local-variable nodes zeta = (z - c_N)/delta with weights d zeta.
    const ContourNodes& gamma_nodes() const { return gamma_; }
    const ContourNodes& theta_nodes() const { return theta_; }
    double delta() const { return delta_; }

private:
    void build_saddle();
    void build_circles();
    std::complex<double> phase(std::complex<double> z) const;  // N (f_N(z) - f_N(c_N))
    std::complex<double> phase_derivative(std::complex<double> z) const;  // f_N'(z)
    // Truncated at the cutoff, or followed to its endpoint (0, a pole or infinity) when to_end is set.
    std::vector<std::complex<double>> trace(std::complex<double> start, double direction, bool to_end = false) const;
    void validate_layout(const std::vector<std::complex<double>>& gamma_plus,
                         const std::vector<std::complex<double>>& gamma_minus,
                         const std::vector<std::complex<double>>& theta) const;
    void finish(const ContourNodes& gamma_z, const ContourNodes& theta_w);

    CuspKernelIntegrand integrand_;
    double sigma_N_;
    CuspContourOptions options_;
    double delta_;
    std::complex<double> f_c_;
    ContourNodes gamma_;
    ContourNodes theta_;
    std::vector<std::complex<double>> gamma_factor_;  // d zeta e^{N(f(z) - f(c))} / (2 pi i)
    std::vector<std::complex<double>> theta_factor_;  // d omega e^{-N(f(w) - f(c))} / (2 pi i)
    Eigen::MatrixXcd cauchy_;                         // 1/(omega_b - zeta_a)
    mutable double imag_residue_ = 0.0;
};

// Pointwise value with a node-doubling check; throws ConvergenceError if the estimate exceeds 1e-8.
double finite_kernel_cusp(const CuspKernelIntegrand& integrand, double sigma_N, double x, double y,
                          const CuspContourOptions& options = {});

struct HardEdgeKernelSpec {
    std::vector<double> lambdas;
    std::vector<int> multiplicity;
    int N = 0;
    int alpha = 0;
    double r = 0.0;
    double R = 0.0;
    int nodes = 256;

    // n = N + alpha eigenvalues distributed as nu; radii sized for the box (0, s].
    static HardEdgeKernelSpec from(const PopulationSpectrum& spec, int N, int alpha, double s);
    double sigma_N() const;
    double zeta_N() const;
    // Radii must satisfy 0 < r < R < N sigma_N lambda_min / 2.
    void validate() const;
};

// Scaled kernel (N^2 sigma_N)^{-1} K_N(x/(N^2 sigma_N), y/(N^2 sigma_N)).
class FiniteHardKernel {
public:
    explicit FiniteHardKernel(const HardEdgeKernelSpec& spec);

    double operator()(double x, double y) const;
    Eigen::MatrixXd matrix(const std::vector<double>& xs, const std::vector<double>& ys) const;
    FiniteHardKernel refined() const;
    const HardEdgeKernelSpec& spec() const { return spec_; }

private:
    HardEdgeKernelSpec spec_;
    std::vector<std::complex<double>> z_, w_;
    std::vector<std::complex<double>> z_factor_, w_factor_;
    Eigen::MatrixXcd cauchy_;
};

double finite_kernel_hard(const HardEdgeKernelSpec& spec, double x, double y);

}  // namespace rmt
