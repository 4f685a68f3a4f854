#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "rmt/bessel.hpp"
#include "rmt/contour.hpp"
#include "rmt/errors.hpp"
#include "rmt/finite_kernels.hpp"
#include "rmt/pearcey.hpp"

using namespace rmt;

TEST_CASE("Bessel J against reference values")
{
    struct Row {
        double x, j0, j1, j3;
    };
    const Row rows[] = {
        {0.5, 0.93846980724081290423, 0.24226845767487388638, 0.0025637299945872440754},
        {1.0, 0.76519768655796655145, 0.44005058574493351596, 0.019563353982668405919},
        {5.5, -0.006843869417819196824, -0.34143821542904335018, 0.25611786514010700402},
        {12.0, 0.047689310796833536624, -0.22344710449062761237, 0.19513693953109267725},
        {30.0, -0.086367983581040211336, -0.11875106261662293652, 0.12921122875972498304},
    };
    for (const Row& r : rows) {
        CHECK(std::abs(bessel_j(0, r.x) - r.j0) < 1e-14);
        CHECK(std::abs(bessel_j(1, r.x) - r.j1) < 1e-14);
        CHECK(std::abs(bessel_j(3, r.x) - r.j3) < 1e-14);
        CHECK(std::abs(bessel_j(-1, r.x) + r.j1) < 1e-14);
    }
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(2, 0.0) == 0.0);
}

TEST_CASE("Bessel kernel symmetry and contour form")
{
    for (int alpha : {0, 1, 2, 3}) {
        for (double x : {0.2, 1.0, 2.7}) {
            for (double y : {0.5, 1.0, 3.9}) {
                CHECK(std::abs(bessel_kernel(alpha, x, y) - bessel_kernel(alpha, y, x)) < 1e-14);
                CHECK(std::abs(bessel_kernel(alpha, x, y) - bessel_kernel_contour(alpha, x, y, 1.0, 2.0, 256)) < 1e-10);
                CHECK(std::abs(bessel_kernel_bounded(alpha, x, y) -
                               std::pow(x / y, 0.5 * alpha) * bessel_kernel(alpha, x, y)) < 1e-13);
            }
        }
    }
    // K_Be^(0)(x, x) = (J_0^2 + J_1^2) / 4 at sqrt x
    const double j0 = bessel_j(0, 1.5), j1 = bessel_j(1, 1.5);
    CHECK(bessel_kernel(0, 2.25, 2.25) == doctest::Approx(0.25 * (j0 * j0 + j1 * j1)).epsilon(1e-12));
    CHECK(std::abs(bessel_kernel_contour(1, 0.7, 1.3, 1.0, 2.0, 256) - bessel_kernel_contour(1, 0.7, 1.3, 0.8, 2.5, 512)) <
          1e-10);
}

TEST_CASE("hard-edge expansion kernel forms agree")
{
    for (int alpha : {0, 1, 2}) {
        for (double x : {0.3, 2.0}) {
            for (double y : {0.3, 1.1, 3.7}) {
                CHECK(std::abs(hard_edge_expansion_kernel(alpha, 4.08, 8.16, 100, x, y) -
                               hard_edge_expansion_kernel_alt(alpha, 4.08, 8.16, 100, x, y)) < 1e-10);
            }
        }
    }
    CHECK(hard_edge_expansion_kernel(0, 4.0, 8.0, 100, 1.0, 2.0) == doctest::Approx(bessel_kernel(0, 1.0, 2.0) -
                                                                                    8.0 / (64.0 * 100.0) * (-1.0) *
                                                                                        bessel_kernel(0, 1.0, 2.0)));
}

TEST_CASE("contour nodes integrate analytic functions")
{
    ContourSpec spec;
    spec.pieces.push_back(ContourPiece::make_circle({0.5, 0.0}, 2.0, 64));
    const ContourNodes nodes = discretize(spec);
    std::complex<double> s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        s1 += nodes.weight[k] / nodes.z[k];
        s2 += nodes.weight[k] * std::exp(nodes.z[k]);
    }
    CHECK(std::abs(s1 - std::complex<double>(0.0, 2.0 * std::numbers::pi)) < 1e-13);
    CHECK(std::abs(s2) < 1e-13);
    ContourSpec seg;
    seg.pieces.push_back(ContourPiece::make_segment({0.0, 0.0}, {1.0, 1.0}, 16));
    const ContourNodes sn = discretize(seg);
    std::complex<double> s3 = 0.0;
    for (std::size_t k = 0; k < sn.size(); ++k) {
        s3 += sn.weight[k] * sn.z[k] * sn.z[k];
    }
    CHECK(std::abs(s3 - std::pow(std::complex<double>(1.0, 1.0), 3) / 3.0) < 1e-14);
    const std::vector<std::complex<double>> square{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
    CHECK(winding_number(square, {0.0, 0.0}) == 1);
    CHECK(winding_number(square, {2.0, 0.0}) == 0);
    const std::vector<std::complex<double>> clockwise(square.rbegin(), square.rend());
    CHECK(winding_number(clockwise, {0.2, -0.3}) == -1);
}

TEST_CASE("Pearcey functions at the origin")
{
    const PearceyKernel k(PearceyParams{});
    const double pi = std::numbers::pi;
    CHECK(std::abs(k.phi(0.0, 0)) < 1e-13);
    CHECK(std::abs(k.phi(0.0, 1) + 1.0 / std::sqrt(pi)) < 1e-13);
    CHECK(std::abs(k.phi(0.0, 3)) < 1e-13);
    CHECK(std::abs(k.psi(0.0, 0) - std::tgamma(0.25) / (2.0 * std::sqrt(2.0) * pi)) < 1e-13);
    CHECK(std::abs(k.psi(0.0, 2) + std::tgamma(0.75) / (std::sqrt(2.0) * pi)) < 1e-13);
    const double k00 = std::tgamma(0.75) / (std::sqrt(2.0) * std::pow(pi, 1.5));
    CHECK(std::abs(k(0.0, 0.0) - k00) < 1e-10);
    CHECK(std::abs(k.evaluate(0.0, 0.0, PearceyRepresentation::contour).value - k00) < 1e-10);
}

TEST_CASE("Pearcey ODEs, symmetry and dual representation")
{
    const std::vector<double> grid = oracle::linear_grid(-3.0, 3.0, 9);
    for (double tau : {-2.0, 0.0, 2.0}) {
        PearceyParams p;
        p.tau = tau;
        const PearceyKernel k(p);
        for (double t : grid) {
            CHECK(std::abs(k.phi(t, 3) - tau * k.phi(t, 1) + t * k.phi(t, 0)) < 1e-8);
            CHECK(std::abs(k.psi(t, 3) - tau * k.psi(t, 1) - t * k.psi(t, 0)) < 1e-8);
            CHECK(std::abs(k.phi_complex(t, 0).imag()) < 1e-10);
        }
        const Eigen::MatrixXd f = k.matrix(grid, grid, PearceyRepresentation::functions);
        const Eigen::MatrixXd c = k.matrix(grid, grid, PearceyRepresentation::contour);
        CHECK((f - c).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((c - c.reverse()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((f - f.reverse()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("Pearcey node doubling")
{
    PearceyParams p;
    p.tau = 1.0;
    PearceyParams q = p;
    q.nodes *= 2;
    q.arc_nodes *= 2;
    const PearceyKernel a(p), b(q);
    for (double x : {-2.5, 0.0, 1.3}) {
        for (double y : {-1.0, 0.4, 2.9}) {
            CHECK(std::abs(a(x, y) - b(x, y)) < 1e-9);
        }
    }
}

TEST_CASE("Pearcey parameter validation")
{
    PearceyParams p;
    CHECK(p.validated_box() >= 3.0);
    CHECK(p.tail_bound(3.0) < 1e-14);
    PearceyParams bad;
    bad.truncation = 2.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    const PearceyKernel k(p);
    CHECK_THROWS(k(p.validated_box() + 1.0, 0.0));
}

TEST_CASE("finite hard-edge kernel matches the Laguerre kernel")
{
    const PopulationSpectrum id({{1.0, 1.0}}, 1.0);
    for (int alpha : {0, 2}) {
        for (int N : {20, 50}) {
            const HardEdgeKernelSpec hs = HardEdgeKernelSpec::from(id, N, alpha, 4.0);
            const FiniteHardKernel k(hs);
            const double scale = 4.0 * (N + alpha);
            for (double x : {0.3, 1.0, 2.5}) {
                for (double y : {0.5, 1.7, 3.9}) {
                    const double kxy = oracle::laguerre_kernel(N, alpha, x / scale, y / scale) / scale;
                    // the conjugation gauge differs, so compare K(x,y)K(y,x) and the diagonal
                    CHECK(std::abs(k(x, y) * k(y, x) - kxy * kxy) < 1e-12);
                }
                const double kxx = oracle::laguerre_kernel(N, alpha, x / scale, x / scale) / scale;
                CHECK(std::abs(k(x, x) - kxx) < 1e-12);
            }
        }
    }
}

TEST_CASE("finite hard-edge kernel: radius invariance and node doubling")
{
    const PopulationSpectrum two({{1.0, 0.5}, {2.0, 0.5}}, 1.0);
    const HardEdgeKernelSpec hs = HardEdgeKernelSpec::from(two, 50, 2, 4.0);
    HardEdgeKernelSpec moved = hs;
    moved.r = 0.5;
    moved.R = 1.5 * hs.R;
    const FiniteHardKernel a(hs), b(moved);
    const FiniteHardKernel c = a.refined();
    for (double x : {0.4, 1.3, 3.8}) {
        for (double y : {0.2, 2.2}) {
            CHECK(std::abs(a(x, y) - b(x, y)) < 1e-10);
            CHECK(std::abs(a(x, y) - c(x, y)) < 1e-9);
        }
    }
    HardEdgeKernelSpec bad = hs;
    bad.R = 0.5 * bad.r;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = hs;
    bad.R = 50.0 * hs.sigma_N();
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("finite hard-edge kernel approaches the Bessel kernel")
{
    const PopulationSpectrum id({{1.0, 1.0}}, 1.0);
    const std::vector<double> grid = oracle::linear_grid(0.1, 4.0, 9);
    for (int alpha : {0, 2}) {
        double previous = 1.0;
        for (int N : {50, 100, 200}) {
            const FiniteHardKernel k(HardEdgeKernelSpec::from(id, N, alpha, 4.0));
            const Eigen::MatrixXd m = k.matrix(grid, grid);
            double err = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                for (std::size_t j = 0; j < grid.size(); ++j) {
                    err = std::max(err, std::abs(m(i, j) - bessel_kernel_bounded(alpha, grid[i], grid[j])));
                }
            }
            CHECK(err < previous);
            previous = err;
        }
    }
}

TEST_CASE("finite cusp kernel: contour families and refinement agree")
{
    const PopulationSpectrum f(oracle::two_atoms, oracle::cusp_gamma);
    const TunedCusp t = tune_exact_cusp(f, 50, 1, TuneParameter::location);
    const CuspKernelIntegrand in = CuspKernelIntegrand::from(t.spectrum, t.sequence);
    CHECK(in.n == 17);
    const std::vector<double> grid = oracle::linear_grid(-3.0, 3.0, 7);
    const FiniteCuspKernel saddle(in, t.sequence.sigma_N);
    CuspContourOptions o;
    o.strategy = CuspContourStrategy::circles;
    const FiniteCuspKernel circles(in, t.sequence.sigma_N, o);
    const Eigen::MatrixXd ms = saddle.matrix(grid, grid);
    CHECK(saddle.last_imag_residue() < 1e-8);
    CHECK((ms - circles.matrix(grid, grid)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((ms - saddle.refined().matrix(grid, grid)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(finite_kernel_cusp(in, t.sequence.sigma_N, 0.5, -0.5) - saddle(0.5, -0.5)) < 1e-9);
    // point symmetry is not exact at finite N, but the kernel is already close to the Pearcey one
    const PearceyKernel pk(PearceyParams{});
    CHECK(std::abs(saddle(0.0, 0.0) - pk(0.0, 0.0)) < 0.05);
}

TEST_CASE("finite cusp kernel: circle radius invariance")
{
    const PopulationSpectrum f(oracle::two_atoms, oracle::cusp_gamma);
    const TunedCusp t = tune_exact_cusp(f, 50, 1, TuneParameter::location);
    const CuspKernelIntegrand in = CuspKernelIntegrand::from(t.spectrum, t.sequence);
    CuspContourOptions a;
    a.strategy = CuspContourStrategy::circles;
    const FiniteCuspKernel base(in, t.sequence.sigma_N, a);
    // Theta must pass between the circle around 1/lambda below c_N and the one around the pole above it
    const double below = 1.0 / std::max(in.lambdas[0], in.lambdas[1]);
    const double above = 1.0 / std::min(in.lambdas[0], in.lambdas[1]);
    const double outer = below + a.gamma_margin * std::min(below, in.c_N - below);
    const double inner = above - a.gamma_margin * (above - in.c_N);
    a.theta_radius = outer + 0.3 * (inner - outer);
    const FiniteCuspKernel moved(in, t.sequence.sigma_N, a);
    for (double x : {-2.0, 0.0, 1.5}) {
        for (double y : {-1.0, 2.5}) {
            CHECK(std::abs(base(x, y) - moved(x, y)) < 1e-10);
        }
    }
}
