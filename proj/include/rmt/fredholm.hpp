#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace rmt {

// Kernel K(x, y) on the real line. The batched form, when set, fills a whole Nystrom matrix at once.
struct KernelEvaluator {
    std::function<double(double, double)> pointwise;
    std::function<Eigen::MatrixXd(const std::vector<double>&, const std::vector<double>&)> batch;

    Eigen::MatrixXd matrix(const std::vector<double>& xs, const std::vector<double>& ys) const;
};

struct GapResult {
    double value = 1.0;
    int order = 0;
    double error_estimate = 0.0;  // |value at order - value at order/2|
    bool converged = false;       // error_estimate below 1e-8
};

// det(I - K) on L^2(a, b) by Gauss-Legendre Nystrom; 1 when a = b. Starts at `order`, doubles up to 4x until the
// halved-order estimate is below 1e-8; throws ConvergenceError if it is still above 1e-6.
GapResult fredholm_det(const KernelEvaluator& kernel, double a, double b, int order = 40);

// det(I - K_Be^(alpha)) on (0, s), computed with the bounded kernel (x/y)^{alpha/2} K_Be.
GapResult F_alpha(int alpha, double s, int order = 40);

// s F_alpha'(s) = -(1/4) <J, (I - K_Be)^{-1} J> F_alpha(s) with J = J_alpha(sqrt(.)) on (0, s).
double s_dF_ds(int alpha, double s, int order = 40);

struct HardEdgePrediction {
    double F = 0.0;
    double s_dF = 0.0;
    double correction = 0.0;  // (1/N) (alpha zeta_N / sigma_N^2) s F'
    double prediction = 0.0;  // F - correction
};

HardEdgePrediction hard_edge_terms(int alpha, double s, int N, double sigma_N, double zeta_N, int order = 40);

double hard_edge_prediction(int alpha, double s, int N, double sigma_N, double zeta_N, int order = 40);

// det(I - K_Pe^(tau)) on (s, t) from the phi/psi representation, spot-checked against the double contour form.
GapResult pearcey_gap(double tau, double s, double t, int order = 40);

}  // namespace rmt
