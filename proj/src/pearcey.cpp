#include "rmt/pearcey.hpp"

#include <cmath>
#include <numbers>

#include "rmt/errors.hpp"

namespace rmt {

using cplx = std::complex<double>;

double PearceyParams::tail_bound(double box) const
{
    const double T = truncation;
    return std::exp(-std::pow(T, 4) / 4.0 + box * T + std::abs(tau) * T * T / 2.0);
}

double PearceyParams::validated_box() const
{
    const double T = truncation;
    return (std::pow(T, 4) / 4.0 - std::abs(tau) * T * T / 2.0 + std::log(1e-14)) / T;
}

void PearceyParams::validate() const
{
    if (!(truncation > 0.0) || nodes < 16 || arc_nodes < 16) {
        throw InvalidArgument("pearcey: truncation must be positive and node counts at least 16");
    }
    if (!(validated_box() > 0.0)) {
        throw InvalidArgument("pearcey: truncation too short for tau, tail bound exceeds 1e-14");
    }
}

PearceyKernel::PearceyKernel(const PearceyParams& params) : params_(params)
{
    params_.validate();
    box_ = params_.validated_box();
    const double T = params_.truncation;
    const cplx up = std::polar(1.0, std::numbers::pi / 4.0);
    const cplx down = std::conj(up);
    // right component: in along e^{i pi/4}, clockwise unit arc, out along e^{-i pi/4}
    ContourSpec right;
    right.nodes_per_piece = params_.nodes;
    right.pieces.push_back(ContourPiece::make_segment(T * up, up));
    right.pieces.push_back(
        ContourPiece::make_arc(0.0, 1.0, std::numbers::pi / 4.0, -std::numbers::pi / 4.0, params_.arc_nodes));
    right.pieces.push_back(ContourPiece::make_segment(down, T * down));
    const ContourNodes r = discretize(right);
    // the left component is the image of the right one under z -> -z
    ContourNodes all = r;
    for (std::size_t k = 0; k < r.size(); ++k) {
        all.z.push_back(-r.z[k]);
        all.weight.push_back(-r.weight[k]);
    }
    const double tau = params_.tau;
    const cplx scale = 1.0 / cplx(0.0, 2.0 * std::numbers::pi);
    sigma_ = all;
    for (std::size_t k = 0; k < all.size(); ++k) {
        const cplx z = all.z[k];
        const cplx z2 = z * z;
        sigma_.weight[k] = all.weight[k] * scale * std::exp(-tau * z2 / 2.0 + z2 * z2 / 4.0);
    }
    ContourSpec axis;
    axis.nodes_per_piece = params_.nodes;
    axis.pieces.push_back(ContourPiece::make_segment(cplx(0.0, -T), 0.0));
    axis.pieces.push_back(ContourPiece::make_segment(0.0, cplx(0.0, T)));
    const ContourNodes a = discretize(axis);
    axis_ = a;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const cplx w = a.z[k];
        const cplx w2 = w * w;
        axis_.weight[k] = a.weight[k] * scale * std::exp(tau * w2 / 2.0 - w2 * w2 / 4.0);
    }
}

void PearceyKernel::check_box(double t) const
{
    if (!(std::abs(t) <= box_)) {
        throw InvalidArgument("pearcey: argument outside the truncation-validated box");
    }
}

cplx PearceyKernel::phi_complex(double x, int order) const
{
    check_box(x);
    if (order < 0 || order > 3) {
        throw InvalidArgument("pearcey: derivative order must be in [0, 3]");
    }
    cplx sum = 0.0;
    for (std::size_t k = 0; k < sigma_.size(); ++k) {
        const cplx z = sigma_.z[k];
        cplx term = sigma_.weight[k] * std::exp(x * z);
        for (int j = 0; j < order; ++j) {
            term *= z;
        }
        sum += term;
    }
    return sum;
}

cplx PearceyKernel::psi_complex(double y, int order) const
{
    check_box(y);
    if (order < 0 || order > 3) {
        throw InvalidArgument("pearcey: derivative order must be in [0, 3]");
    }
    cplx sum = 0.0;
    for (std::size_t k = 0; k < axis_.size(); ++k) {
        const cplx w = axis_.z[k];
        cplx term = axis_.weight[k] * std::exp(-y * w);
        for (int j = 0; j < order; ++j) {
            term *= -w;
        }
        sum += term;
    }
    return sum;
}

double PearceyKernel::functions_offdiagonal(double x, double y) const
{
    const double p0 = phi(x, 0), p1 = phi(x, 1), p2 = phi(x, 2);
    const double q0 = psi(y, 0), q1 = psi(y, 1), q2 = psi(y, 2);
    return (p2 * q0 - p1 * q1 + p0 * q2 - params_.tau * p0 * q0) / (x - y);
}

PearceyValue PearceyKernel::functions_diagonal(double x) const
{
    // symmetric differencing around the diagonal, Richardson-corrected
    auto average = [&](double h) {
        return 0.5 * (functions_offdiagonal(x + h, x - h) + functions_offdiagonal(x - h, x + h));
    };
    const double h = 1e-5;
    const double coarse = average(h);
    const double fine = average(0.5 * h);
    PearceyValue v;
    v.value = (4.0 * fine - coarse) / 3.0;
    v.unstable_diagonal = std::abs(fine - coarse) > 1e-7;
    return v;
}

PearceyValue PearceyKernel::contour_value(double x, double y) const
{
    check_box(x);
    check_box(y);
    std::vector<cplx> fw(axis_.size());
    for (std::size_t l = 0; l < axis_.size(); ++l) {
        fw[l] = axis_.weight[l] * std::exp(-y * axis_.z[l]);
    }
    cplx sum = 0.0;
    for (std::size_t k = 0; k < sigma_.size(); ++k) {
        const cplx z = sigma_.z[k];
        cplx inner = 0.0;
        for (std::size_t l = 0; l < axis_.size(); ++l) {
            inner += fw[l] / (axis_.z[l] - z);
        }
        sum += sigma_.weight[k] * std::exp(x * z) * inner;
    }
    PearceyValue v;
    v.value = sum.real();
    v.imag_residue = std::abs(sum.imag());
    return v;
}

PearceyValue PearceyKernel::evaluate(double x, double y, PearceyRepresentation rep) const
{
    check_box(x);
    check_box(y);
    if (rep == PearceyRepresentation::contour) {
        return contour_value(x, y);
    }
    const double gap = std::abs(x - y);
    if (gap == 0.0) {
        return functions_diagonal(x);
    }
    if (gap < 1e-5) {
        return contour_value(x, y);
    }
    PearceyValue v;
    v.value = functions_offdiagonal(x, y);
    return v;
}

Eigen::MatrixXd PearceyKernel::matrix(const std::vector<double>& xs, const std::vector<double>& ys,
                                      PearceyRepresentation rep) const
{
    const Eigen::Index nx = static_cast<Eigen::Index>(xs.size());
    const Eigen::Index ny = static_cast<Eigen::Index>(ys.size());
    Eigen::MatrixXd out(nx, ny);
    if (rep == PearceyRepresentation::contour) {
        const Eigen::Index mz = static_cast<Eigen::Index>(sigma_.size());
        const Eigen::Index mw = static_cast<Eigen::Index>(axis_.size());
        Eigen::MatrixXcd A(nx, mz), B(mw, ny), C(mz, mw);
        for (Eigen::Index i = 0; i < nx; ++i) {
            check_box(xs[i]);
            for (Eigen::Index k = 0; k < mz; ++k) {
                A(i, k) = sigma_.weight[k] * std::exp(xs[i] * sigma_.z[k]);
            }
        }
        for (Eigen::Index j = 0; j < ny; ++j) {
            check_box(ys[j]);
            for (Eigen::Index l = 0; l < mw; ++l) {
                B(l, j) = axis_.weight[l] * std::exp(-ys[j] * axis_.z[l]);
            }
        }
        for (Eigen::Index k = 0; k < mz; ++k) {
            for (Eigen::Index l = 0; l < mw; ++l) {
                C(k, l) = 1.0 / (axis_.z[l] - sigma_.z[k]);
            }
        }
        out = (A * C * B).real();
        return out;
    }
    std::vector<double> p0(nx), p1(nx), p2(nx), q0(ny), q1(ny), q2(ny);
    for (Eigen::Index i = 0; i < nx; ++i) {
        p0[i] = phi(xs[i], 0);
        p1[i] = phi(xs[i], 1);
        p2[i] = phi(xs[i], 2);
    }
    for (Eigen::Index j = 0; j < ny; ++j) {
        q0[j] = psi(ys[j], 0);
        q1[j] = psi(ys[j], 1);
        q2[j] = psi(ys[j], 2);
    }
    for (Eigen::Index i = 0; i < nx; ++i) {
        for (Eigen::Index j = 0; j < ny; ++j) {
            const double gap = std::abs(xs[i] - ys[j]);
            if (gap < 1e-5) {
                out(i, j) = evaluate(xs[i], ys[j], PearceyRepresentation::functions).value;
            } else {
                out(i, j) = (p2[i] * q0[j] - p1[i] * q1[j] + p0[i] * q2[j] - params_.tau * p0[i] * q0[j]) /
                            (xs[i] - ys[j]);
            }
        }
    }
    return out;
}

double pearcey_phi_psi(const PearceyParams& params, double t, PearceyFunction which, int order)
{
    const PearceyKernel k(params);
    return which == PearceyFunction::phi ? k.phi(t, order) : k.psi(t, order);
}

double pearcey_kernel(const PearceyParams& params, double x, double y, PearceyRepresentation rep)
{
    return PearceyKernel(params).evaluate(x, y, rep).value;
}

}  // namespace rmt
