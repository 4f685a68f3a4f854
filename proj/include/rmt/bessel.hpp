#pragma once

#include <utility>

namespace rmt {

// J_alpha(x) for integer alpha and 0 <= x <= 100.
double bessel_j(int alpha, double x);

// Bessel kernel K_Be^{(alpha)}(x, y) for x, y > 0.
double bessel_kernel(int alpha, double x, double y);

// The conjugated kernel (x/y)^{alpha/2} K_Be^{(alpha)}(x, y), bounded on (0, s)^2.
double bessel_kernel_bounded(int alpha, double x, double y);

// Contour-integral form of K_Be^{(alpha)} on circles |z| = r, |w| = R (r < R), trapezoid rule.
double bessel_kernel_contour(int alpha, double x, double y, double r, double R, int nodes);

// (x/y)^{alpha/2} {K_Be - zeta_N/(4 sigma_N^2 N) [alpha J(sqrt x) J(sqrt y) + (x - y) K_Be]}.
double hard_edge_expansion_kernel(int alpha, double sigma_N, double zeta_N, int N, double x, double y);

// Same expansion with (x - y) K_Be rewritten through J_{alpha +- 1}.
double hard_edge_expansion_kernel_alt(int alpha, double sigma_N, double zeta_N, int N, double x, double y);

}  // namespace rmt
