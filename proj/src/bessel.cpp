#include "rmt/bessel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "rmt/errors.hpp"

namespace rmt {

namespace {

// Power series in extended precision; cancellation stays below 1e-16 relative to 1 for x <= 12.
double bessel_series(int alpha, double x)
{
    const long double h = 0.5L * x;
    long double term = 1.0L;
    for (int k = 1; k <= alpha; ++k) {
        term *= h / k;
    }
    const long double h2 = h * h;
    long double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= -h2 / (static_cast<long double>(n) * (n + alpha));
        sum += term;
        if (std::abs(term) < 1e-20L * std::abs(sum) && std::abs(term) < 1e-22L) {
            break;
        }
    }
    return static_cast<double>(sum);
}

}  // namespace

double bessel_j(int alpha, double x)
{
    if (x < 0.0 || !std::isfinite(x)) {
        throw InvalidArgument("bessel_j: x must be finite and nonnegative");
    }
    if (x > 100.0) {
        throw InvalidArgument("bessel_j: argument above 100 is out of scope");
    }
    const int order = std::abs(alpha);
    const double sign = (alpha < 0 && order % 2 == 1) ? -1.0 : 1.0;
    if (x <= 12.0) {
        return sign * bessel_series(order, x);
    }
    return sign * std::cyl_bessel_j(static_cast<double>(order), x);
}

double bessel_kernel(int alpha, double x, double y)
{
    if (!(x > 0.0) || !(y > 0.0)) {
        throw InvalidArgument("bessel_kernel: x and y must be positive");
    }
    if (std::abs(x - y) <= 1e-6 * (1.0 + x)) {
        // symmetric kernel: the midpoint diagonal value is accurate to O((x - y)^2)
        const double u = std::sqrt(0.5 * (x + y));
        const double j = bessel_j(alpha, u);
        return (j * j - bessel_j(alpha + 1, u) * bessel_j(alpha - 1, u)) / 4.0;
    }
    const double sx = std::sqrt(x);
    const double sy = std::sqrt(y);
    const double jx = bessel_j(alpha, sx);
    const double jy = bessel_j(alpha, sy);
    const double dx = 0.5 * (bessel_j(alpha - 1, sx) - bessel_j(alpha + 1, sx));
    const double dy = 0.5 * (bessel_j(alpha - 1, sy) - bessel_j(alpha + 1, sy));
    return (sy * jx * dy - sx * dx * jy) / (2.0 * (x - y));
}

double bessel_kernel_bounded(int alpha, double x, double y)
{
    return std::pow(x / y, 0.5 * alpha) * bessel_kernel(alpha, x, y);
}

double bessel_kernel_contour(int alpha, double x, double y, double r, double R, int nodes)
{
    if (!(r > 0.0) || !(R > r)) {
        throw InvalidArgument("bessel_kernel_contour: need 0 < r < R");
    }
    if (nodes < 16) {
        throw InvalidArgument("bessel_kernel_contour: at least 16 nodes per circle");
    }
    using cplx = std::complex<double>;
    std::vector<cplx> fz(nodes), fw(nodes), z(nodes), w(nodes);
    for (int k = 0; k < nodes; ++k) {
        const double theta = 2.0 * std::numbers::pi * (k + 0.5) / nodes;
        z[k] = std::polar(r, theta);
        w[k] = std::polar(R, theta);
        fz[k] = std::pow(z[k], alpha) * std::exp(-x / z[k] + z[k] / 4.0);
        fw[k] = std::pow(w[k], -alpha) * std::exp(y / w[k] - w[k] / 4.0);
    }
    cplx sum = 0.0;
    for (int k = 0; k < nodes; ++k) {
        cplx inner = 0.0;
        for (int l = 0; l < nodes; ++l) {
            inner += fw[l] / (z[k] - w[l]);
        }
        sum += fz[k] * inner;
    }
    // (1/(2 pi i))^2 oint dz/z oint dw/w h = mean over both trapezoid grids of h
    return std::pow(y / x, 0.5 * alpha) * sum.real() / (static_cast<double>(nodes) * nodes);
}

double hard_edge_expansion_kernel(int alpha, double sigma_N, double zeta_N, int N, double x, double y)
{
    const double k = bessel_kernel(alpha, x, y);
    const double jj = alpha * bessel_j(alpha, std::sqrt(x)) * bessel_j(alpha, std::sqrt(y));
    const double coeff = zeta_N / (4.0 * sigma_N * sigma_N * N);
    return std::pow(x / y, 0.5 * alpha) * (k - coeff * (jj + (x - y) * k));
}

double hard_edge_expansion_kernel_alt(int alpha, double sigma_N, double zeta_N, int N, double x, double y)
{
    const double sx = std::sqrt(x);
    const double sy = std::sqrt(y);
    const double pair = sx * bessel_j(alpha + 1, sx) * bessel_j(alpha, sy) +
                        sy * bessel_j(alpha, sx) * bessel_j(alpha - 1, sy);
    const double coeff = zeta_N / (8.0 * sigma_N * sigma_N * N);
    return std::pow(x / y, 0.5 * alpha) * (bessel_kernel(alpha, x, y) - coeff * pair);
}

}  // namespace rmt
