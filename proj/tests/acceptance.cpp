// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "rmt/bessel.hpp"
#include "rmt/edge_analysis.hpp"
#include "rmt/finite_kernels.hpp"
#include "rmt/fredholm.hpp"
#include "rmt/montecarlo.hpp"
#include "rmt/pearcey.hpp"
#include "rmt/spectral_model.hpp"

using namespace rmt;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

const PopulationSpectrum cusp_spec()
{
    const ExactCusp e = exact_cusp_gamma(oracle::two_atoms, 0.56);
    return PopulationSpectrum(oracle::two_atoms, e.gamma);
}

Outcome marchenko_pastur()
{
    const Stopwatch w;
    const PopulationSpectrum mp({{1.0, 1.0}}, 1.0);
    double worst = 0.0;
    for (double x : oracle::linear_grid(0.1, 3.9, 3801)) {
        worst = std::max(worst, std::abs(density(mp, x) - oracle::mp_density(x)));
    }
    const double t = w.seconds();
    std::ostringstream d;
    d << "sup_err=" << worst << " time=" << t << "s";
    return {worst < 1e-8 && t < 5.0, d.str()};
}

Outcome two_atom_cusp()
{
    const ExactCusp e = exact_cusp_gamma(oracle::two_atoms, 0.56);
    const PopulationSpectrum s = cusp_spec();
    const SupportDescription sup = support(s);
    const double a = g_eval(s, e.c, 0);
    const double rho_a = density(s, a);
    bool isolated = true;
    for (double h : oracle::log_grid(1e-7, 1e-2, 11)) {
        isolated = isolated && density(s, a - h) > 0.0 && density(s, a + h) > 0.0;
    }
    const bool single = sup.intervals.size() == 1;
    const bool interior = single && a > sup.intervals[0].left && a < sup.intervals[0].right;
    std::ostringstream d;
    d << "gamma=" << e.gamma << " intervals=" << sup.intervals.size() << " a=" << a << " rho(a)=" << rho_a
      << " c=" << e.c;
    return {std::abs(e.gamma - 0.336) < 0.005 && single && interior && rho_a < 1e-6 && isolated && e.c > 1.0 / 3.0 &&
                e.c < 1.0,
            d.str()};
}

Outcome cube_root_law()
{
    const ExactCusp e = exact_cusp_gamma(oracle::two_atoms, 0.56);
    const PopulationSpectrum s = cusp_spec();
    const double a = g_eval(s, e.c, 0);
    const double g3 = oracle::g_derivative(oracle::two_atoms, e.gamma, e.c, 3);
    const double coeff = std::sqrt(3.0) / (2.0 * std::numbers::pi) * std::cbrt(6.0 / g3);
    std::vector<double> lx, ly;
    for (double delta : oracle::log_grid(1e-6, 1e-3, 25)) {
        for (double sign : {-1.0, 1.0}) {
            lx.push_back(std::log(delta));
            ly.push_back(std::log(density(s, a + sign * delta)));
        }
    }
    const oracle::LineFit f = oracle::least_squares(lx, ly);
    const double rel = std::abs(std::exp(f.intercept) / coeff - 1.0);
    std::ostringstream d;
    d << "slope=" << f.slope << " prefactor=" << std::exp(f.intercept) << " expected=" << coeff << " rel=" << rel;
    return {std::abs(f.slope - 1.0 / 3.0) < 0.02 && rel < 0.01, d.str()};
}

Outcome hard_edge_law()
{
    bool ok = true;
    std::ostringstream d;
    for (const std::vector<Atom>& atoms : {std::vector<Atom>{{1.0, 1.0}}, std::vector<Atom>{{1.0, 0.5}, {2.0, 0.5}}}) {
        const PopulationSpectrum s(atoms, 1.0);
        double inv = 0.0;
        for (const Atom& at : atoms) {
            inv += at.weight / at.lambda;
        }
        // g''(infinity) = -2 sum w / lambda in the variable 1/m
        const double coeff = std::sqrt(2.0 * inv / 2.0) / std::numbers::pi;
        std::vector<double> lx, ly;
        for (double x : oracle::log_grid(1e-10, 1e-6, 21)) {
            lx.push_back(std::log(x));
            ly.push_back(std::log(density(s, x)));
        }
        const oracle::LineFit f = oracle::least_squares(lx, ly);
        const double rel = std::abs(std::exp(f.intercept) / coeff - 1.0);
        ok = ok && std::abs(f.slope + 0.5) < 0.02 && rel < 0.01;
        d << "[atoms=" << atoms.size() << " slope=" << f.slope << " rel=" << rel << "] ";
    }
    return {ok, d.str()};
}

Outcome pearcey_dual()
{
    const std::vector<double> grid = oracle::linear_grid(-3.0, 3.0, 25);
    double dual = 0.0, sym = 0.0, ode = 0.0;
    for (double tau : {-2.0, 0.0, 2.0}) {
        PearceyParams p;
        p.tau = tau;
        const PearceyKernel k(p);
        const Eigen::MatrixXd f = k.matrix(grid, grid, PearceyRepresentation::functions);
        const Eigen::MatrixXd c = k.matrix(grid, grid, PearceyRepresentation::contour);
        dual = std::max(dual, (f - c).cwiseAbs().maxCoeff());
        // the grid is symmetric about 0, so reversing both axes maps (x, y) to (-x, -y)
        sym = std::max({sym, (f - f.reverse()).cwiseAbs().maxCoeff(), (c - c.reverse()).cwiseAbs().maxCoeff()});
        for (double t : grid) {
            ode = std::max(ode, std::abs(k.phi(t, 3) - tau * k.phi(t, 1) + t * k.phi(t, 0)));
            ode = std::max(ode, std::abs(k.psi(t, 3) - tau * k.psi(t, 1) - t * k.psi(t, 0)));
        }
    }
    std::ostringstream d;
    d << "dual=" << dual << " symmetry=" << sym << " ode=" << ode;
    return {dual < 1e-8 && sym < 1e-10 && ode < 1e-8, d.str()};
}

Outcome cusp_kernel_convergence()
{
    const Stopwatch w;
    const PopulationSpectrum s = cusp_spec();
    const std::vector<double> grid = oracle::linear_grid(-3.0, 3.0, 25);
    const Eigen::MatrixXd pe = PearceyKernel(PearceyParams{}).matrix(grid, grid, PearceyRepresentation::functions);
    std::vector<double> sup;
    std::ostringstream d;
    for (int N : {50, 100, 200}) {
        const TunedCusp t = tune_exact_cusp(s, N, 1, TuneParameter::location);
        const FiniteCuspKernel k(CuspKernelIntegrand::from(t.spectrum, t.sequence), t.sequence.sigma_N);
        sup.push_back((k.matrix(grid, grid) - pe).cwiseAbs().maxCoeff());
        d << "N=" << N << ":" << sup.back() << " ";
    }
    const double time = w.seconds();
    d << "time=" << time << "s";
    return {sup[1] < sup[0] && sup[2] < sup[1] && time < 300.0, d.str()};
}

Outcome hard_edge_order()
{
    const Stopwatch w;
    const PopulationSpectrum id({{1.0, 1.0}}, 1.0);
    bool ok = true;
    std::ostringstream d;
    for (int alpha : {1, 2}) {
        for (double s : {1.0, 4.0}) {
            double r[3];
            int i = 0;
            for (int N : {50, 100, 200}) {
                const FiniteHardKernel k(HardEdgeKernelSpec::from(id, N, alpha, s));
                KernelEvaluator e;
                e.batch = [&k](const std::vector<double>& x, const std::vector<double>& y) { return k.matrix(x, y); };
                const HardEdgeConstants h = hard_edge(id, N, alpha);
                r[i++] = fredholm_det(e, 0.0, s).value - hard_edge_prediction(alpha, s, N, h.sigma_N, h.zeta_N);
            }
            for (int j = 0; j < 2; ++j) {
                const double ratio = r[j] / r[j + 1];
                ok = ok && ratio >= 3.2 && ratio <= 4.8;
                d << "a=" << alpha << ",s=" << s << ",N=" << (50 << j) << ":" << ratio << " ";
            }
        }
    }
    const double time = w.seconds();
    d << "time=" << time << "s";
    return {ok && time < 120.0, d.str()};
}

Outcome tracy_widom()
{
    const double h = 1e-4;
    double worst = 0.0;
    for (int alpha : {-1, 0, 1, 2}) {
        for (double s : {1.0, 2.0, 4.0}) {
            const double fd = s * (F_alpha(alpha, s + h).value - F_alpha(alpha, s - h).value) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - s_dF_ds(alpha, s)));
        }
    }
    std::ostringstream d;
    d << "max_diff=" << worst;
    return {worst < 1e-6, d.str()};
}

Outcome fredholm_engine()
{
    auto det = [](std::function<double(double, double)> f, double a, double b) {
        KernelEvaluator e;
        e.pointwise = std::move(f);
        return fredholm_det(e, a, b);
    };
    double rank_one = 0.0;
    rank_one = std::max(rank_one, std::abs(det([](double, double) { return 1.0; }, 0.0, 0.5).value - 0.5));
    rank_one = std::max(rank_one, std::abs(det([](double x, double y) { return x * y; }, 0.0, 1.0).value - 2.0 / 3.0));
    rank_one = std::max(rank_one, std::abs(det([](double x, double y) { return std::exp(x - 2.0 * y); }, 0.0, 1.0).value -
                                           std::exp(-1.0)));

    std::vector<GapResult> gaps;
    for (int alpha : {0, 1, 2}) {
        gaps.push_back(F_alpha(alpha, 4.0));
    }
    for (double tau : {-2.0, 0.0, 2.0}) {
        gaps.push_back(pearcey_gap(tau, -1.0, 2.0));
    }
    const PopulationSpectrum id({{1.0, 1.0}}, 1.0);
    const FiniteHardKernel hk(HardEdgeKernelSpec::from(id, 50, 2, 4.0));
    KernelEvaluator he;
    he.batch = [&hk](const std::vector<double>& x, const std::vector<double>& y) { return hk.matrix(x, y); };
    gaps.push_back(fredholm_det(he, 0.0, 4.0));
    const TunedCusp t = tune_exact_cusp(cusp_spec(), 50, 1, TuneParameter::location);
    const FiniteCuspKernel ck(CuspKernelIntegrand::from(t.spectrum, t.sequence), t.sequence.sigma_N);
    KernelEvaluator ce;
    ce.batch = [&ck](const std::vector<double>& x, const std::vector<double>& y) { return ck.matrix(x, y); };
    gaps.push_back(fredholm_det(ce, -1.0, 1.0));

    double worst = 0.0;
    bool converged = true;
    for (const GapResult& g : gaps) {
        worst = std::max(worst, g.error_estimate);
        converged = converged && g.converged;
    }
    std::ostringstream d;
    d << "rank_one_err=" << rank_one << " max_order_doubling=" << worst;
    return {rank_one < 1e-12 && worst < 1e-8 && converged, d.str()};
}

Outcome monte_carlo()
{
    const Stopwatch w;
    const PopulationSpectrum id({{1.0, 1.0}}, 1.0);
    const int N = 100;
    const int alpha = 2;
    const HardEdgeConstants h = hard_edge(id, N, alpha);
    SimulationConfig c;
    c.mode = SimulationMode::hard_edge;
    c.N = N;
    c.lambdas.assign(N + alpha, 1.0);
    c.reps = 100000;
    c.seed = 1;
    c.scale = static_cast<double>(N) * N * h.sigma_N;
    const SimulationRun run = simulate(c);
    bool ok = true;
    std::ostringstream d;
    for (const SurvivalPoint& p : empirical_smallest_cdf(run, {1.0, 4.0})) {
        const HardEdgePrediction pred = hard_edge_terms(alpha, p.s, N, h.sigma_N, h.zeta_N);
        const double dev = std::abs(p.survival - pred.prediction);
        ok = ok && dev < std::abs(p.survival - pred.F) && dev < 3.0 * p.std_error;
        d << "[s=" << p.s << " P=" << p.survival << " pred=" << pred.prediction << " F=" << pred.F
          << " z=" << dev / p.std_error << "] ";
    }
    const double time = w.seconds();
    d << "time=" << time << "s";
    return {ok && time < 600.0, d.str()};
}

}  // namespace

int main()
{
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"1 Marchenko-Pastur oracle", marchenko_pastur},
        {"2 two-atom cusp reproduction", two_atom_cusp},
        {"3 cube-root law at the cusp", cube_root_law},
        {"4 inverse square-root law at the hard edge", hard_edge_law},
        {"5 Pearcey dual representation", pearcey_dual},
        {"6 finite-N cusp kernel approaches Pearcey", cusp_kernel_convergence},
        {"7 hard-edge 1/N^2 remainder", hard_edge_order},
        {"8 Tracy-Widom identity", tracy_widom},
        {"9 Fredholm engine", fredholm_engine},
        {"10 Monte Carlo smallest eigenvalue", monte_carlo},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
