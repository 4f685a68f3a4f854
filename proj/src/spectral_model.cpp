#include "rmt/spectral_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "rmt/errors.hpp"
#include "rmt/parallel.hpp"

namespace rmt {

PopulationSpectrum::PopulationSpectrum(std::vector<Atom> atoms, double gamma,
                                       std::optional<FiniteN> finite_n)
    : atoms_(std::move(atoms)), gamma_(gamma), finite_n_(finite_n)
{
    if (atoms_.empty()) {
        throw InvalidArgument("spectrum: at least one atom is required");
    }
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
        throw InvalidArgument("spectrum: gamma must be positive");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
        const Atom& a = atoms_[j];
        if (!(a.lambda > 0.0) || !std::isfinite(a.lambda)) {
            throw InvalidArgument("spectrum: atom locations must be positive");
        }
        if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
            throw InvalidArgument("spectrum: atom weights must be positive");
        }
        if (j > 0 && !(a.lambda > atoms_[j - 1].lambda)) {
            throw InvalidArgument("spectrum: atom locations must be strictly increasing");
        }
        total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidArgument("spectrum: weights must sum to 1");
    }
    if (finite_n_ && (finite_n_->N <= 0 || finite_n_->n <= 0)) {
        throw InvalidArgument("spectrum: finite_n requires positive N and n");
    }
}

double PopulationSpectrum::aspect_ratio(bool finite_n_mode) const
{
    if (!finite_n_mode) {
        return gamma_;
    }
    if (!finite_n_) {
        throw InvalidArgument("spectrum: finite-N mode needs finite_n data");
    }
    return static_cast<double>(finite_n_->n) / finite_n_->N;
}

std::vector<int> PopulationSpectrum::multiplicities() const
{
    if (!finite_n_) {
        throw InvalidArgument("spectrum: multiplicities need finite_n data");
    }
    std::vector<int> out;
    int total = 0;
    for (const Atom& a : atoms_) {
        const double count = a.weight * finite_n_->n;
        const double rounded = std::round(count);
        if (std::abs(count - rounded) > 1e-8 || rounded < 1.0) {
            throw InvalidArgument("spectrum: weight times n is not a positive integer");
        }
        out.push_back(static_cast<int>(rounded));
        total += out.back();
    }
    if (total != finite_n_->n) {
        throw InvalidArgument("spectrum: multiplicities do not add up to n");
    }
    return out;
}

std::vector<double> PopulationSpectrum::poles() const
{
    std::vector<double> p;
    for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it) {
        p.push_back(1.0 / it->lambda);
    }
    return p;
}

PopulationSpectrum PopulationSpectrum::with_gamma(double gamma) const
{
    return PopulationSpectrum(atoms_, gamma, finite_n_);
}

PopulationSpectrum PopulationSpectrum::with_finite_n(std::optional<FiniteN> finite_n) const
{
    return PopulationSpectrum(atoms_, gamma_, finite_n);
}

namespace {

template <class T>
T pow_int(T base, int e)
{
    T r = T(1);
    for (int k = 0; k < e; ++k) {
        r *= base;
    }
    return r;
}

// k-th derivative: (-1)^k k!/m^{k+1} + gamma sum_j w_j k! (lambda_j/(1 - m lambda_j))^{k+1}
template <class T, class R>
T g_generic(const PopulationSpectrum& spec, T m, int order, R gam)
{
    R fact = 1;
    for (int k = 2; k <= order; ++k) {
        fact *= k;
    }
    const R sign = (order % 2 == 0) ? R(1) : R(-1);
    T sum = T(0);
    for (const Atom& a : spec.atoms()) {
        const R lam = static_cast<R>(a.lambda);
        sum += static_cast<R>(a.weight) * pow_int(T(lam) / (T(1) - m * lam), order + 1);
    }
    return fact * (sign / pow_int(m, order + 1) + gam * sum);
}

template <class T>
void check_poles(const PopulationSpectrum& spec, T m)
{
    if (std::abs(m) < 1e-13) {
        throw PoleProximityError("g_eval: m is too close to 0");
    }
    for (const Atom& a : spec.atoms()) {
        if (std::abs(m - T(1.0 / a.lambda)) < 1e-13) {
            throw PoleProximityError("g_eval: m is too close to a pole 1/lambda");
        }
    }
}

void check_order(int order)
{
    if (order < 0 || order > 5) {
        throw InvalidArgument("g_eval: order must be in [0, 5]");
    }
}

using lcplx = std::complex<long double>;

lcplx g_long(const PopulationSpectrum& spec, lcplx m, int order, long double gam)
{
    return g_generic(spec, m, order, gam);
}

// Coefficients (ascending) of m prod(1 - m l_k)(1/m - z) + gamma m sum_j w_j l_j prod_{k!=j}(1 - m l_k).
std::vector<cplx> fixed_point_polynomial(const PopulationSpectrum& spec, cplx z, double gam)
{
    const auto& atoms = spec.atoms();
    const std::size_t K = atoms.size();
    auto multiply = [](const std::vector<cplx>& p, cplx c0, cplx c1) {
        std::vector<cplx> r(p.size() + 1, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            r[i] += p[i] * c0;
            r[i + 1] += p[i] * c1;
        }
        return r;
    };
    std::vector<cplx> full{1.0};
    for (const Atom& a : atoms) {
        full = multiply(full, 1.0, -a.lambda);
    }
    std::vector<cplx> poly = multiply(full, 1.0, -z);
    for (std::size_t j = 0; j < K; ++j) {
        std::vector<cplx> part{0.0, gam * atoms[j].weight * atoms[j].lambda};
        for (std::size_t k = 0; k < K; ++k) {
            if (k != j) {
                part = multiply(part, 1.0, -atoms[k].lambda);
            }
        }
        for (std::size_t i = 0; i < part.size(); ++i) {
            poly[i] += part[i];
        }
    }
    return poly;
}

std::vector<cplx> polynomial_roots(std::vector<cplx> poly)
{
    double biggest = 0.0;
    for (const cplx& c : poly) {
        biggest = std::max(biggest, std::abs(c));
    }
    while (poly.size() > 1 && std::abs(poly.back()) <= 1e-14 * biggest) {
        poly.pop_back();
    }
    const int d = static_cast<int>(poly.size()) - 1;
    if (d < 1) {
        return {};
    }
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) {
        companion(i, i - 1) = 1.0;
    }
    for (int i = 0; i < d; ++i) {
        companion(i, d - 1) = -poly[i] / poly[d];
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("solve_stieltjes: companion eigenvalue solver failed");
    }
    std::vector<cplx> roots(d);
    for (int i = 0; i < d; ++i) {
        roots[i] = solver.eigenvalues()[i];
    }
    return roots;
}

// Newton on g(m) - z in extended precision; only accepts steps that reduce the defect.
cplx polish_root(const PopulationSpectrum& spec, cplx root, cplx z, double gam)
{
    lcplx m(root.real(), root.imag());
    const lcplx target(z.real(), z.imag());
    const long double lg = gam;
    auto defect = [&](lcplx v) { return std::abs(g_long(spec, v, 0, lg) - target); };
    try {
        long double current = defect(m);
        for (int it = 0; it < 200 && current > 0.0L; ++it) {
            const lcplx step = (g_long(spec, m, 0, lg) - target) / g_long(spec, m, 1, lg);
            const lcplx next = m - step;
            const long double next_defect = defect(next);
            if (!(next_defect < current)) {
                break;
            }
            m = next;
            current = next_defect;
            if (std::abs(step) < 1e-19L * std::abs(m)) {
                break;
            }
        }
    } catch (const PoleProximityError&) {
        return root;
    }
    return cplx(static_cast<double>(m.real()), static_cast<double>(m.imag()));
}

double fixed_point_defect(const PopulationSpectrum& spec, cplx m, cplx z, double gam)
{
    cplx sum = 0.0;
    for (const Atom& a : spec.atoms()) {
        sum += a.weight * a.lambda / (1.0 - m * a.lambda);
    }
    return std::abs(m - 1.0 / (z - gam * sum));
}

bool near_pole(const PopulationSpectrum& spec, cplx m)
{
    if (std::abs(m) < 1e-13) {
        return true;
    }
    for (const Atom& a : spec.atoms()) {
        if (std::abs(m - 1.0 / a.lambda) < 1e-13) {
            return true;
        }
    }
    return false;
}

std::vector<cplx> all_roots(const PopulationSpectrum& spec, cplx z, double gam)
{
    std::vector<cplx> roots = polynomial_roots(fixed_point_polynomial(spec, z, gam));
    std::vector<cplx> out;
    for (const cplx& r : roots) {
        if (near_pole(spec, r)) {
            continue;
        }
        out.push_back(polish_root(spec, r, z, gam));
    }
    return out;
}

cplx select_upper(const PopulationSpectrum& spec, cplx z, double gam)
{
    const std::vector<cplx> roots = all_roots(spec, z, gam);
    std::vector<cplx> lower;
    for (const cplx& r : roots) {
        if (r.imag() < -1e-14 * (1.0 + std::abs(r))) {
            lower.push_back(r);
        }
    }
    if (lower.size() != 1) {
        throw RootSelectionError("solve_stieltjes: expected exactly one root in the lower half plane, found " +
                                 std::to_string(lower.size()));
    }
    return lower.front();
}

}  // namespace

cplx g_eval(const PopulationSpectrum& spec, cplx m, int order, bool finite_n_mode)
{
    check_order(order);
    check_poles(spec, m);
    return g_generic(spec, m, order, spec.aspect_ratio(finite_n_mode));
}

double g_eval(const PopulationSpectrum& spec, double m, int order, bool finite_n_mode)
{
    check_order(order);
    check_poles(spec, m);
    return g_generic(spec, m, order, spec.aspect_ratio(finite_n_mode));
}

StieltjesValue solve_stieltjes(const PopulationSpectrum& spec, cplx z, bool finite_n_mode)
{
    const double gam = spec.aspect_ratio(finite_n_mode);
    if (z.imag() < 0.0) {
        throw InvalidArgument("solve_stieltjes: z must lie in the closed upper half plane");
    }
    if (z == cplx(0.0, 0.0)) {
        throw InvalidArgument("solve_stieltjes: z = 0 is excluded");
    }
    StieltjesValue out;
    out.z = z;
    if (z.imag() > 0.0) {
        out.m = select_upper(spec, z, gam);
    } else {
        const double x = z.real();
        // the offset must stay small against |x| too, where m grows like |x|^{-1/2}
        const double eps = 1e-9 * std::min(1.0 + std::abs(x), 1e3 * std::abs(x));
        const cplx guide = select_upper(spec, cplx(x, eps), gam);
        const std::vector<cplx> roots = all_roots(spec, z, gam);
        double best = std::numeric_limits<double>::infinity();
        cplx chosen = guide;
        bool found = false;
        for (const cplx& r : roots) {
            if (r.imag() > 1e-12 * (1.0 + std::abs(r))) {
                continue;
            }
            const double dist = std::abs(r - guide);
            if (dist < best) {
                best = dist;
                chosen = r;
                found = true;
            }
        }
        if (!found) {
            throw RootSelectionError("solve_stieltjes: no admissible root at real z");
        }
        if (chosen.imag() > 0.0) {
            chosen.imag(0.0);
        }
        out.m = chosen;
    }
    out.residual = fixed_point_defect(spec, out.m, z, gam);
    return out;
}

double density(const PopulationSpectrum& spec, double x, bool finite_n_mode)
{
    if (!(x > 0.0)) {
        throw InvalidArgument("density: x must be positive");
    }
    const StieltjesValue v = solve_stieltjes(spec, cplx(x, 0.0), finite_n_mode);
    const double rho = -v.m.imag() / std::numbers::pi;
    return rho < 1e-13 ? 0.0 : rho;
}

DensityCurve density_grid(const PopulationSpectrum& spec, double x_min, double x_max, int n_points,
                          bool finite_n_mode)
{
    if (!(x_min > 0.0) || !(x_max > x_min) || n_points < 2) {
        throw InvalidArgument("density_grid: need 0 < x_min < x_max and at least 2 points");
    }
    DensityCurve curve;
    curve.grid.resize(n_points);
    curve.values.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        curve.grid[i] = x_min + (x_max - x_min) * i / (n_points - 1);
    }
    curve.grid.back() = x_max;
    parallel_for(n_points, [&](std::size_t i) {
        curve.values[i] = density(spec, curve.grid[i], finite_n_mode);
    });
    curve.mass_at_zero = std::max(1.0 - spec.aspect_ratio(finite_n_mode), 0.0);
    return curve;
}

namespace {

// Sample point of the t-parametrization of one component of D.
struct Component {
    double lo;  // -inf allowed
    double hi;  // +inf allowed
    double scale;

    double at(double t) const
    {
        if (std::isinf(lo)) {
            return hi - scale * std::tan(0.5 * std::numbers::pi * (1.0 - t));
        }
        if (std::isinf(hi)) {
            return lo + scale * std::tan(0.5 * std::numbers::pi * t);
        }
        return lo + (hi - lo) * 0.5 * (1.0 - std::cos(std::numbers::pi * t));
    }
};

// Safeguarded Newton for f(m) = g^{(k)}(m) on a sign-change bracket.
double refine_root(const PopulationSpectrum& spec, int k, double a, double b, double gam)
{
    auto f = [&](double m) { return g_generic(spec, m, k, gam); };
    auto df = [&](double m) { return g_generic(spec, m, k + 1, gam); };
    double fa = f(a);
    double x = 0.5 * (a + b);
    for (int it = 0; it < 300; ++it) {
        const double fx = f(x);
        if (fx == 0.0) {
            return x;
        }
        if ((fx < 0.0) == (fa < 0.0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        const double d = df(x);
        double next = x - fx / d;
        if (!(next > a && next < b) || !std::isfinite(next)) {
            next = 0.5 * (a + b);
        }
        const double tol = 1e-16 * std::max(1.0, std::abs(next));
        if (std::abs(next - x) <= tol || (b - a) <= tol) {
            return next;
        }
        x = next;
    }
    return x;
}

std::vector<Component> components(const PopulationSpectrum& spec)
{
    const std::vector<double> poles = spec.poles();
    const double scale = poles.back();
    std::vector<Component> comps;
    comps.push_back({-std::numeric_limits<double>::infinity(), 0.0, scale});
    double prev = 0.0;
    for (double p : poles) {
        comps.push_back({prev, p, scale});
        prev = p;
    }
    comps.push_back({prev, std::numeric_limits<double>::infinity(), scale});
    return comps;
}

struct ScanPoint {
    double m;
    double d1;
    double d2;
};

}  // namespace

std::vector<CriticalRoot> critical_roots(const PopulationSpectrum& spec, const ScanOptions& options,
                                         bool finite_n_mode, std::vector<std::string>* warnings)
{
    if (options.points_per_interval < 16) {
        throw InvalidArgument("support: scan needs at least 16 points per interval");
    }
    const double gam = spec.aspect_ratio(finite_n_mode);
    const int n = options.points_per_interval;
    std::vector<CriticalRoot> roots;
    for (const Component& comp : components(spec)) {
        std::vector<ScanPoint> pts;
        pts.reserve(n);
        for (int i = 0; i < n; ++i) {
            const double m = comp.at((i + 0.5) / n);
            if (near_pole(spec, m) || !std::isfinite(m)) {
                continue;
            }
            pts.push_back({m, g_generic(spec, m, 1, gam), g_generic(spec, m, 2, gam)});
        }
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const ScanPoint& p = pts[i];
            const ScanPoint& q = pts[i + 1];
            if (p.d1 == 0.0) {
                roots.push_back({p.m, p.d2, g_generic(spec, p.m, 3, gam), false});
                continue;
            }
            const bool root_here = (p.d1 < 0.0) != (q.d1 < 0.0) && q.d1 != 0.0;
            if (root_here) {
                const double r = refine_root(spec, 1, p.m, q.m, gam);
                roots.push_back({r, g_generic(spec, r, 2, gam), g_generic(spec, r, 3, gam), false});
            }
            const bool extremum_here = (p.d2 < 0.0) != (q.d2 < 0.0);
            if (!extremum_here || root_here) {
                continue;
            }
            // g' has a local extremum inside this cell; look for a tangency or a hidden pair of roots.
            const double e = refine_root(spec, 2, p.m, q.m, gam);
            const double v = g_generic(spec, e, 1, gam);
            double scale1 = 1.0 / (e * e);
            for (const Atom& a : spec.atoms()) {
                const double t = a.lambda / (1.0 - e * a.lambda);
                scale1 += gam * a.weight * t * t;
            }
            const bool opposite = (v < 0.0) != (p.d1 < 0.0);
            if (std::abs(v) <= 1e-10 * scale1) {
                roots.push_back({e, g_generic(spec, e, 2, gam), g_generic(spec, e, 3, gam), true});
            } else if (opposite) {
                const double r1 = refine_root(spec, 1, p.m, e, gam);
                const double r2 = refine_root(spec, 1, e, q.m, gam);
                roots.push_back({r1, g_generic(spec, r1, 2, gam), g_generic(spec, r1, 3, gam), false});
                roots.push_back({r2, g_generic(spec, r2, 2, gam), g_generic(spec, r2, 3, gam), false});
                if (warnings) {
                    warnings->push_back("support: two zeros of g' closer than the scan step near m = " +
                                        std::to_string(e));
                }
            }
        }
    }
    std::sort(roots.begin(), roots.end(), [](const CriticalRoot& a, const CriticalRoot& b) { return a.m < b.m; });
    return roots;
}

namespace {

struct Gap {
    double lo;
    double hi;
    double lo_pre;
    double hi_pre;
};

// g at a breakpoint of D approached from the given side: +-inf at poles, 0 at +-inf.
double g_limit(const PopulationSpectrum& spec, double m, bool from_right, double gam)
{
    if (std::isinf(m)) {
        return 0.0;
    }
    if (m == 0.0) {
        return from_right ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    }
    for (const Atom& a : spec.atoms()) {
        if (m == 1.0 / a.lambda) {
            return from_right ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        }
    }
    return g_generic(spec, m, 0, gam);
}

}  // namespace

SupportDescription support(const PopulationSpectrum& spec, const ScanOptions& options, bool finite_n_mode)
{
    SupportDescription out;
    const double gam = spec.aspect_ratio(finite_n_mode);
    const std::vector<CriticalRoot> roots = critical_roots(spec, options, finite_n_mode, &out.warnings);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<Gap> gaps;
    for (const Component& comp : components(spec)) {
        std::vector<double> cuts{comp.lo};
        for (const CriticalRoot& r : roots) {
            if (!r.double_root && r.m > comp.lo && r.m < comp.hi) {
                cuts.push_back(r.m);
            }
        }
        cuts.push_back(comp.hi);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double u = cuts[i];
            const double v = cuts[i + 1];
            // probe g' inside (u, v) on a few interior points, trusting the largest in magnitude
            double probe = 0.0;
            for (double t : {0.25, 0.5, 0.75}) {
                double m;
                if (std::isinf(u)) {
                    m = v - (1.0 + std::abs(v)) * (1.0 / (1.0 - t) - 1.0) - 1e-3 * (1.0 + std::abs(v));
                } else if (std::isinf(v)) {
                    m = u + (1.0 + std::abs(u)) * (1.0 / (1.0 - t) - 1.0) + 1e-3 * (1.0 + std::abs(u));
                } else {
                    m = u + t * (v - u);
                }
                if (near_pole(spec, m)) {
                    continue;
                }
                const double d = g_generic(spec, m, 1, gam);
                if (std::abs(d) > std::abs(probe)) {
                    probe = d;
                }
            }
            if (probe < 0.0) {
                const double gu = g_limit(spec, u, true, gam);
                const double gv = g_limit(spec, v, false, gam);
                gaps.push_back({gv, gu, std::isinf(v) ? nan : v, std::isinf(u) ? nan : u});
            }
        }
    }
    std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) { return a.lo < b.lo; });

    // support = (0, inf) minus the union of the open gaps
    double cursor = 0.0;
    double cursor_pre = nan;
    for (const Gap& gap : gaps) {
        if (gap.hi <= cursor) {
            continue;
        }
        if (gap.lo > cursor) {
            out.intervals.push_back({cursor, gap.lo, cursor_pre, gap.lo_pre});
        }
        cursor = gap.hi;
        cursor_pre = gap.hi_pre;
        if (std::isinf(cursor)) {
            break;
        }
    }
    if (!std::isinf(cursor)) {
        out.intervals.push_back({cursor, std::numeric_limits<double>::infinity(), cursor_pre, nan});
    }
    out.hard_edge = !out.intervals.empty() && out.intervals.front().left == 0.0;
    for (const SupportInterval& iv : out.intervals) {
        if (!std::isnan(iv.left_preimage)) {
            out.preimages.push_back(iv.left_preimage);
        }
        if (!std::isnan(iv.right_preimage)) {
            out.preimages.push_back(iv.right_preimage);
        }
    }
    for (const CriticalRoot& r : roots) {
        if (r.double_root) {
            out.preimages.push_back(r.m);
        }
    }
    std::sort(out.preimages.begin(), out.preimages.end());
    return out;
}

}  // namespace rmt
