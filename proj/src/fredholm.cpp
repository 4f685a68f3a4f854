#include "rmt/fredholm.hpp"

#include <cmath>
#include <sstream>

#include "rmt/bessel.hpp"
#include "rmt/errors.hpp"
#include "rmt/parallel.hpp"
#include "rmt/pearcey.hpp"
#include "rmt/quadrature.hpp"

namespace rmt {

Eigen::MatrixXd KernelEvaluator::matrix(const std::vector<double>& xs, const std::vector<double>& ys) const
{
    if (batch) {
        return batch(xs, ys);
    }
    if (!pointwise) {
        throw InvalidArgument("kernel evaluator has no evaluation function");
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
    parallel_for(xs.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pointwise(xs[i], ys[j]);
        }
    });
    return out;
}

namespace {

struct Nystrom {
    QuadratureRule rule;
    Eigen::VectorXd sqrt_w;
    Eigen::MatrixXd khat;  // sqrt(w_i) K(x_i, x_j) sqrt(w_j)
};

Nystrom discretize_kernel(const KernelEvaluator& kernel, double a, double b, int order)
{
    Nystrom out;
    out.rule = gauss_legendre(order, a, b);
    out.sqrt_w.resize(order);
    for (int i = 0; i < order; ++i) {
        out.sqrt_w[i] = std::sqrt(out.rule.weights[i]);
    }
    const Eigen::MatrixXd K = kernel.matrix(out.rule.nodes, out.rule.nodes);
    out.khat = out.sqrt_w.asDiagonal() * K * out.sqrt_w.asDiagonal();
    for (Eigen::Index i = 0; i < out.khat.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.khat.cols(); ++j) {
            if (!std::isfinite(out.khat(i, j))) {
                throw NumericalError("fredholm_det: kernel is not finite at a quadrature node");
            }
        }
    }
    return out;
}

double det_at(const KernelEvaluator& kernel, double a, double b, int order)
{
    const Nystrom n = discretize_kernel(kernel, a, b, order);
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(order, order) - n.khat;
    return M.partialPivLu().determinant();
}

KernelEvaluator bounded_bessel(int alpha)
{
    KernelEvaluator k;
    k.pointwise = [alpha](double x, double y) { return bessel_kernel_bounded(alpha, x, y); };
    return k;
}

}  // namespace

GapResult fredholm_det(const KernelEvaluator& kernel, double a, double b, int order)
{
    if (order < 8) {
        throw InvalidArgument("fredholm_det: order must be at least 8");
    }
    if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidArgument("fredholm_det: need a finite interval a <= b");
    }
    GapResult r;
    if (a == b) {
        r.order = order;
        r.converged = true;
        return r;
    }
    double coarse = det_at(kernel, a, b, order / 2);
    for (int current = order; current <= 4 * order; current *= 2) {
        const double fine = det_at(kernel, a, b, current);
        r.value = fine;
        r.order = current;
        r.error_estimate = std::abs(fine - coarse);
        if (r.error_estimate < 1e-8) {
            r.converged = true;
            return r;
        }
        coarse = fine;
    }
    if (r.error_estimate > 1e-6) {
        std::ostringstream msg;
        msg << "fredholm_det: order " << r.order << " still changes the determinant by " << r.error_estimate;
        throw ConvergenceError(msg.str());
    }
    return r;
}

GapResult F_alpha(int alpha, double s, int order)
{
    if (!(s >= 0.0) || !std::isfinite(s)) {
        throw InvalidArgument("F_alpha: s must be nonnegative");
    }
    return fredholm_det(bounded_bessel(alpha), 0.0, s, order);
}

double s_dF_ds(int alpha, double s, int order)
{
    const GapResult F = F_alpha(alpha, s, order);
    KernelEvaluator symmetric;
    symmetric.pointwise = [alpha](double x, double y) { return bessel_kernel(alpha, x, y); };
    const Nystrom n = discretize_kernel(symmetric, 0.0, s, F.order);
    Eigen::VectorXd J(F.order);
    for (int i = 0; i < F.order; ++i) {
        J[i] = n.sqrt_w[i] * bessel_j(alpha, std::sqrt(n.rule.nodes[i]));
    }
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(F.order, F.order) - n.khat;
    const Eigen::VectorXd v = M.partialPivLu().solve(J);
    const double residual = (M * v - J).norm() / std::max(J.norm(), 1e-300);
    if (residual > 1e-10) {
        std::ostringstream msg;
        msg << "s_dF_ds: ill-conditioned resolvent system, relative residual " << residual;
        throw NumericalError(msg.str());
    }
    return -0.25 * J.dot(v) * F.value;
}

HardEdgePrediction hard_edge_terms(int alpha, double s, int N, double sigma_N, double zeta_N, int order)
{
    if (N <= 0 || !(sigma_N > 0.0)) {
        throw InvalidArgument("hard_edge_prediction: need N > 0 and sigma_N > 0");
    }
    HardEdgePrediction p;
    p.F = F_alpha(alpha, s, order).value;
    p.s_dF = alpha == 0 ? 0.0 : s_dF_ds(alpha, s, order);
    p.correction = alpha * zeta_N / (sigma_N * sigma_N) * p.s_dF / N;
    p.prediction = p.F - p.correction;
    return p;
}

double hard_edge_prediction(int alpha, double s, int N, double sigma_N, double zeta_N, int order)
{
    return hard_edge_terms(alpha, s, N, sigma_N, zeta_N, order).prediction;
}

GapResult pearcey_gap(double tau, double s, double t, int order)
{
    if (!(s <= t)) {
        throw InvalidArgument("pearcey_gap: need s <= t");
    }
    PearceyParams params;
    params.tau = tau;
    const PearceyKernel kernel(params);
    const double box = params.validated_box();
    if (std::abs(s) > box || std::abs(t) > box) {
        std::ostringstream msg;
        msg << "pearcey_gap: interval leaves the validated box |x| <= " << box;
        throw InvalidArgument(msg.str());
    }
    KernelEvaluator k;
    k.batch = [&kernel](const std::vector<double>& xs, const std::vector<double>& ys) {
        return kernel.matrix(xs, ys, PearceyRepresentation::functions);
    };
    const GapResult r = fredholm_det(k, s, t, order);
    const double mid = 0.5 * (s + t);
    for (const auto& [x, y] : {std::pair{s, t}, std::pair{mid, s}, std::pair{t, mid}}) {
        const double a = kernel.evaluate(x, y, PearceyRepresentation::functions).value;
        const double b = kernel.evaluate(x, y, PearceyRepresentation::contour).value;
        if (x != y && std::abs(a - b) > 1e-8) {
            std::ostringstream msg;
            msg << "pearcey_gap: kernel representations disagree by " << std::abs(a - b) << " at (" << x << ", " << y
                << ")";
            throw NumericalError(msg.str());
        }
    }
    return r;
}

}  // namespace rmt
