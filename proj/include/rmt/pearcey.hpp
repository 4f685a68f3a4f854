#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "rmt/contour.hpp"

namespace rmt {

struct PearceyParams {
    double tau = 0.0;
    double truncation = 8.0;
    int nodes = 200;      // per ray of Sigma and per half of the imaginary axis
    int arc_nodes = 64;   // per unit arc of Sigma

    // exp(-T^4/4 + s T + |tau| T^2/2) for the working box |x|, |y| <= s
    double tail_bound(double box) const;
    // Largest box whose tail bound stays below 1e-14.
    double validated_box() const;
    void validate() const;
};

enum class PearceyFunction { phi, psi };
enum class PearceyRepresentation { functions, contour };

struct PearceyValue {
    double value = 0.0;
    double imag_residue = 0.0;
    bool unstable_diagonal = false;
};

// Pearcey kernel K_Pe^{(tau)} with quadrature nodes computed once.
class PearceyKernel {
public:
    explicit PearceyKernel(const PearceyParams& params);

    const PearceyParams& params() const { return params_; }

    // order-th derivative, order in 0..3, as the raw complex quadrature sum
    std::complex<double> phi_complex(double x, int order) const;
    std::complex<double> psi_complex(double y, int order) const;
    double phi(double x, int order = 0) const { return phi_complex(x, order).real(); }
    double psi(double y, int order = 0) const { return psi_complex(y, order).real(); }

    PearceyValue evaluate(double x, double y, PearceyRepresentation rep) const;
    double operator()(double x, double y) const { return evaluate(x, y, PearceyRepresentation::functions).value; }

    Eigen::MatrixXd matrix(const std::vector<double>& xs, const std::vector<double>& ys,
                           PearceyRepresentation rep) const;

    const ContourNodes& sigma_nodes() const { return sigma_; }
    const ContourNodes& axis_nodes() const { return axis_; }

private:
    void check_box(double t) const;
    double functions_offdiagonal(double x, double y) const;
    PearceyValue functions_diagonal(double x) const;
    PearceyValue contour_value(double x, double y) const;

    PearceyParams params_;
    double box_;
    ContourNodes sigma_;  // weights include 1/(2 pi i) and the z-dependent part of the exponent
    ContourNodes axis_;   // same for the imaginary axis
};

double pearcey_phi_psi(const PearceyParams& params, double t, PearceyFunction which, int order);
double pearcey_kernel(const PearceyParams& params, double x, double y, PearceyRepresentation rep);

}  // namespace rmt
