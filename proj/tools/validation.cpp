#include "validation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rmt/bessel.hpp"
#include "rmt/edge_analysis.hpp"
#include "rmt/finite_kernels.hpp"
#include "rmt/fredholm.hpp"
#include "rmt/pearcey.hpp"
#include "rmt/spectral_model.hpp"

using namespace rmt;

namespace {

std::string fmt(const char* label, double v)
{
    std::ostringstream s;
    s << label << "=" << v;
    return s.str();
}

CheckResult mp_oracle(bool quick)
{
    const PopulationSpectrum mp({{1.0, 1.0}}, 1.0);
    const int points = quick ? 200 : 2000;
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = 0.1 + 3.8 * i / (points - 1);
        const double exact = std::sqrt((4.0 - x) / x) / (2.0 * std::numbers::pi);
        worst = std::max(worst, std::abs(density(mp, x) - exact));
    }
    return {"marchenko-pastur density", worst < 1e-8, fmt("sup_err", worst)};
}

CheckResult pearcey_dual(bool quick)
{
    const int n = quick ? 7 : 13;
    std::vector<double> g;
    for (int i = 0; i < n; ++i) {
        g.push_back(-3.0 + 6.0 * i / (n - 1));
    }
    double dual = 0.0;
    double sym = 0.0;
    for (double tau : {-2.0, 0.0, 2.0}) {
        PearceyParams p;
        p.tau = tau;
        const PearceyKernel k(p);
        const Eigen::MatrixXd f = k.matrix(g, g, PearceyRepresentation::functions);
        const Eigen::MatrixXd c = k.matrix(g, g, PearceyRepresentation::contour);
        dual = std::max(dual, (f - c).cwiseAbs().maxCoeff());
        // the grid is symmetric, so reversing both axes maps (x, y) to (-x, -y)
        const Eigen::MatrixXd r = c.reverse();
        sym = std::max(sym, (c - r).cwiseAbs().maxCoeff());
    }
    return {"pearcey representations agree", dual < 1e-8 && sym < 1e-10,
            fmt("dual", dual) + " " + fmt("symmetry", sym)};
}

CheckResult fredholm_rank_one()
{
    KernelEvaluator one;
    one.pointwise = [](double, double) { return 1.0; };
    KernelEvaluator xy;
    xy.pointwise = [](double x, double y) { return x * y; };
    const double e1 = std::abs(fredholm_det(one, 0.0, 0.5).value - 0.5);
    const double e2 = std::abs(fredholm_det(xy, 0.0, 1.0).value - 2.0 / 3.0);
    return {"fredholm rank-one determinants", e1 < 1e-12 && e2 < 1e-12, fmt("err", std::max(e1, e2))};
}

CheckResult tracy_widom(bool quick)
{
    std::vector<int> alphas = quick ? std::vector<int>{1} : std::vector<int>{-1, 0, 1, 2};
    std::vector<double> ss = quick ? std::vector<double>{2.0} : std::vector<double>{1.0, 2.0, 4.0};
    const double h = 1e-4;
    double worst = 0.0;
    for (int a : alphas) {
        for (double s : ss) {
            const double fd = s * (F_alpha(a, s + h).value - F_alpha(a, s - h).value) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - s_dF_ds(a, s)));
        }
    }
    return {"resolvent derivative matches finite differences", worst < 1e-6, fmt("max_diff", worst)};
}

double residual(int alpha, double s, int N)
{
    const PopulationSpectrum id({{1.0, 1.0}}, 1.0);
    const HardEdgeKernelSpec hs = HardEdgeKernelSpec::from(id, N, alpha, s);
    const FiniteHardKernel k(hs);
    KernelEvaluator e;
    e.batch = [&k](const std::vector<double>& x, const std::vector<double>& y) { return k.matrix(x, y); };
    return fredholm_det(e, 0.0, s).value - hard_edge_prediction(alpha, s, N, hs.sigma_N(), hs.zeta_N());
}

CheckResult hard_edge_order(bool quick)
{
    std::vector<int> alphas = quick ? std::vector<int>{1} : std::vector<int>{1, 2};
    std::vector<double> ss = quick ? std::vector<double>{1.0} : std::vector<double>{1.0, 4.0};
    std::vector<int> Ns = quick ? std::vector<int>{50} : std::vector<int>{50, 100};
    bool ok = true;
    std::ostringstream detail;
    for (int a : alphas) {
        for (double s : ss) {
            for (int N : Ns) {
                const double ratio = residual(a, s, N) / residual(a, s, 2 * N);
                ok = ok && ratio >= 3.2 && ratio <= 4.8;
                detail << "a=" << a << ",s=" << s << ",N=" << N << ":" << ratio << " ";
            }
        }
    }
    return {"hard-edge expansion remainder is O(1/N^2)", ok, detail.str()};
}

CheckResult hard_edge_blowup()
{
    bool ok = true;
    std::ostringstream detail;
    for (const std::vector<Atom>& atoms : {std::vector<Atom>{{1.0, 1.0}}, std::vector<Atom>{{1.0, 0.5}, {2.0, 0.5}}}) {
        const PopulationSpectrum spec(atoms, 1.0);
        const HardEdgeConstants h = hard_edge(spec, 100, 0);
        const double x = 1e-10;
        const double ratio = std::sqrt(x) * density(spec, x) / h.blowup_coeff;
        ok = ok && std::abs(ratio - 1.0) < 0.01;
        detail << ratio << " ";
    }
    return {"inverse square-root blow-up at the hard edge", ok, "ratio=" + detail.str()};
}

}  // namespace

std::vector<CheckResult> run_validation(bool quick)
{
    std::vector<CheckResult> out;
    auto guarded = [&out](const std::string& name, auto check) {
        try {
            out.push_back(check());
        } catch (const std::exception& e) {
            out.push_back({name, false, e.what()});
        }
    };
    guarded("marchenko-pastur density", [&] { return mp_oracle(quick); });
    guarded("inverse square-root blow-up at the hard edge", [] { return hard_edge_blowup(); });
    guarded("pearcey representations agree", [&] { return pearcey_dual(quick); });
    guarded("fredholm rank-one determinants", [] { return fredholm_rank_one(); });
    guarded("resolvent derivative matches finite differences", [&] { return tracy_widom(quick); });
    guarded("hard-edge expansion remainder is O(1/N^2)", [&] { return hard_edge_order(quick); });
    return out;
}
