#include "rmt/finite_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rmt/errors.hpp"
#include "rmt/quadrature.hpp"

namespace rmt {

using cplx = std::complex<double>;

namespace {

const cplx two_pi_i(0.0, 2.0 * std::numbers::pi);

// Gauss-Legendre nodes along a polyline traversed in vertex order.
ContourNodes polyline_nodes(const std::vector<cplx>& vertices, int per_segment)
{
    ContourNodes out;
    const QuadratureRule rule = gauss_legendre(per_segment, 0.0, 1.0);
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
        const cplx a = vertices[i];
        const cplx d = vertices[i + 1] - a;
        for (int k = 0; k < per_segment; ++k) {
            out.z.push_back(a + rule.nodes[k] * d);
            out.weight.push_back(rule.weights[k] * d);
        }
    }
    return out;
}

ContourNodes arc_nodes(cplx center, double radius, double from, double to, int n)
{
    ContourSpec spec;
    spec.pieces.push_back(ContourPiece::make_arc(center, radius, from, to, n));
    return discretize(spec);
}

std::vector<cplx> conj_all(const std::vector<cplx>& v)
{
    std::vector<cplx> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](cplx z) { return std::conj(z); });
    return out;
}

std::vector<cplx> reversed(std::vector<cplx> v)
{
    std::reverse(v.begin(), v.end());
    return v;
}

std::vector<cplx> arc_points(cplx center, double radius, double from, double to, int n)
{
    std::vector<cplx> out;
    for (int k = 0; k <= n; ++k) {
        out.push_back(center + std::polar(radius, from + (to - from) * k / n));
    }
    return out;
}

void append(std::vector<cplx>& a, const std::vector<cplx>& b)
{
    a.insert(a.end(), b.begin(), b.end());
}

}  // namespace

CuspKernelIntegrand CuspKernelIntegrand::from(const PopulationSpectrum& spec, const FiniteNCuspSequence& seq)
{
    if (!spec.finite_n()) {
        throw InvalidArgument("cusp kernel: spectrum has no finite_n data");
    }
    CuspKernelIntegrand out;
    out.multiplicity = spec.multiplicities();
    for (const Atom& a : spec.atoms()) {
        out.lambdas.push_back(a.lambda);
    }
    out.N = spec.finite_n()->N;
    out.n = spec.finite_n()->n;
    out.c_N = seq.c_N;
    out.a_N = seq.a_N;
    out.q = seq.c_N;
    out.validate();
    return out;
}

void CuspKernelIntegrand::validate() const
{
    if (lambdas.empty() || lambdas.size() != multiplicity.size()) {
        throw InvalidArgument("cusp kernel: lambdas and multiplicities must match");
    }
    int total = 0;
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        if (!(lambdas[j] > 0.0) || multiplicity[j] < 1) {
            throw InvalidArgument("cusp kernel: lambdas must be positive with positive multiplicities");
        }
        total += multiplicity[j];
    }
    if (total != n || N <= 0) {
        throw InvalidArgument("cusp kernel: multiplicities must add up to n");
    }
    if (q != c_N) {
        throw InvalidArgument("cusp kernel: q must equal c_N");
    }
    if (!(c_N > 0.0)) {
        throw InvalidArgument("cusp kernel: c_N must be positive");
    }
}

FiniteCuspKernel::FiniteCuspKernel(const CuspKernelIntegrand& integrand, double sigma_N,
                                   const CuspContourOptions& options)
    : integrand_(integrand), sigma_N_(sigma_N), options_(options)
{
    integrand_.validate();
    if (!(sigma_N > 0.0)) {
        throw InvalidArgument("cusp kernel: sigma_N must be positive");
    }
    if (options_.panel_nodes < 2 || options_.local_nodes < 16 || options_.circle_nodes < 16 ||
        !(options_.box > 0.0) || !(options_.cutoff > 0.0) || !(options_.gamma_margin > 0.0)) {
        throw InvalidArgument("cusp kernel: invalid contour options");
    }
    delta_ = sigma_N_ * std::pow(static_cast<double>(integrand_.N), -0.25);
    f_c_ = 0.0;
    f_c_ = phase(integrand_.c_N);
    if (options_.strategy == CuspContourStrategy::saddle) {
        build_saddle();
    } else {
        build_circles();
    }
}

cplx FiniteCuspKernel::phase(cplx z) const
{
    const double N = integrand_.N;
    cplx s = -N * integrand_.a_N * (z - integrand_.c_N) + N * std::log(z);
    for (std::size_t j = 0; j < integrand_.lambdas.size(); ++j) {
        s -= static_cast<double>(integrand_.multiplicity[j]) * std::log(1.0 - integrand_.lambdas[j] * z);
    }
    return s - f_c_;
}

cplx FiniteCuspKernel::phase_derivative(cplx z) const
{
    cplx s = -integrand_.a_N + 1.0 / z;
    for (std::size_t j = 0; j < integrand_.lambdas.size(); ++j) {
        const double l = integrand_.lambdas[j];
        s += static_cast<double>(integrand_.multiplicity[j]) / integrand_.N * l / (1.0 - l * z);
    }
    return s;
}

// Follows the steepest path of Re f_N (direction -1 descends, +1 ascends) until the integrand,
// including the worst e^{box |zeta|} growth, is below e^{-cutoff}.
std::vector<cplx> FiniteCuspKernel::trace(cplx start, double direction, bool to_end) const
{
    const double N = integrand_.N;
    const double c = integrand_.c_N;
    std::vector<cplx> pts{start};
    cplx z = start;
    auto singular_distance = [&](cplx p) {
        double d = std::abs(p);
        for (double l : integrand_.lambdas) {
            d = std::min(d, std::abs(p - 1.0 / l));
        }
        return d;
    };
    double far = 1.0;
    for (double l : integrand_.lambdas) {
        far = std::max(far, 1.0 / l);
    }
    auto heading = [&](cplx p) {
        const cplx d = phase_derivative(p);
        const double m = std::abs(d);
        if (m == 0.0) {
            return cplx(0.0);
        }
        return direction * std::conj(d) / m;
    };
    for (int step = 0; step < 200000; ++step) {
        const double slope = N * std::abs(phase_derivative(z));
        const double dist = singular_distance(z);
        const double h = to_end ? std::min(0.2 * dist, std::max(delta_ / (1.0 + options_.box), 0.2 * std::abs(z)))
                                : std::min({delta_ / (1.0 + options_.box), 2.0 / std::max(slope, 1e-300), 0.2 * dist});
        cplx v = heading(z);
        if (v == cplx(0.0)) {
            v = (z - c) / std::abs(z - c);
        }
        cplx v2 = heading(z + 0.5 * h * v);
        if (v2 == cplx(0.0)) {
            v2 = v;
        }
        z += h * v2;
        pts.push_back(z);
        if (to_end) {
            if (singular_distance(z) < 1e-9 * far || std::abs(z) > 1e4 * far) {
                return pts;
            }
            continue;
        }
        const double zeta = std::abs(z - c) / delta_;
        const double drop = direction * phase(z).real();
        if (drop - options_.box * zeta > options_.cutoff) {
            return pts;
        }
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            break;
        }
    }
    throw ContourError("cusp kernel: steepest path did not reach the truncation level");
}

void FiniteCuspKernel::build_saddle()
{
    const double c = integrand_.c_N;
    const double d = delta_;
    const double q = std::numbers::pi / 4.0;
    const std::vector<cplx> right = trace(c + std::polar(d, q), -1.0);
    const std::vector<cplx> left = trace(c + std::polar(d, 3.0 * q), -1.0);
    const std::vector<cplx> up = trace(c + cplx(0.0, d), 1.0);
    const int pn = options_.panel_nodes;
    const int ln = options_.local_nodes;

    ContourNodes gz = polyline_nodes(reversed(right), pn);
    gz.append(arc_nodes(c, d, q, -q, ln));
    gz.append(polyline_nodes(conj_all(right), pn));
    gz.append(polyline_nodes(reversed(conj_all(left)), pn));
    gz.append(arc_nodes(c, d, 5.0 * q, 3.0 * q, ln));
    gz.append(polyline_nodes(left, pn));

    ContourNodes tw = polyline_nodes(reversed(conj_all(up)), pn);
    ContourSpec seg;
    seg.pieces.push_back(ContourPiece::make_segment(cplx(c, -d), cplx(c, d), ln));
    tw.append(discretize(seg));
    tw.append(polyline_nodes(up, pn));

    // the truncated paths are open; the layout is checked on the paths followed to their endpoints
    const std::vector<cplx> right_full = trace(c + std::polar(d, q), -1.0, true);
    const std::vector<cplx> left_full = trace(c + std::polar(d, 3.0 * q), -1.0, true);
    const std::vector<cplx> up_full = trace(c + cplx(0.0, d), 1.0, true);
    std::vector<cplx> gplus = reversed(right_full);
    append(gplus, arc_points(c, d, q, -q, 16));
    append(gplus, conj_all(right_full));
    std::vector<cplx> gminus = reversed(conj_all(left_full));
    append(gminus, arc_points(c, d, 5.0 * q, 3.0 * q, 16));
    append(gminus, left_full);
    std::vector<cplx> theta = reversed(conj_all(up_full));
    append(theta, up_full);
    validate_layout(gplus, gminus, theta);
    finish(gz, tw);
}

void FiniteCuspKernel::build_circles()
{
    const double c = integrand_.c_N;
    std::vector<double> above, below;
    for (double l : integrand_.lambdas) {
        (1.0 / l > c ? above : below).push_back(1.0 / l);
    }
    const double margin = options_.gamma_margin;
    const int nodes = options_.circle_nodes;
    ContourSpec gspec;
    gspec.nodes_per_piece = nodes;
    double inner_plus = std::numeric_limits<double>::infinity();
    double outer_minus = 0.0;
    std::vector<cplx> gplus, gminus, theta;
    if (!above.empty()) {
        const auto [lo, hi] = std::minmax_element(above.begin(), above.end());
        const double radius = 0.5 * (*hi - *lo) + margin * (*lo - c);
        const double center = 0.5 * (*lo + *hi);
        gspec.pieces.push_back(ContourPiece::make_circle(center, radius));
        inner_plus = center - radius;
        gplus = arc_points(center, radius, 0.0, 2.0 * std::numbers::pi, 256);
    }
    if (!below.empty()) {
        const auto [lo, hi] = std::minmax_element(below.begin(), below.end());
        const double gap = std::min(*lo, c - *hi);
        const double radius = 0.5 * (*hi - *lo) + margin * gap;
        const double center = 0.5 * (*lo + *hi);
        gspec.pieces.push_back(ContourPiece::make_circle(center, radius));
        outer_minus = center + radius;
        gminus = arc_points(center, radius, 0.0, 2.0 * std::numbers::pi, 256);
    }
    double rt = options_.theta_radius;
    if (rt <= 0.0) {
        if (below.empty()) {
            rt = 0.5 * std::min(c, inner_plus);
        } else {
            rt = 0.5 * (outer_minus + std::min(inner_plus, 2.0 * c));
        }
    }
    ContourSpec tspec;
    tspec.nodes_per_piece = nodes;
    tspec.pieces.push_back(ContourPiece::make_circle(0.0, rt));
    theta = arc_points(0.0, rt, 0.0, 2.0 * std::numbers::pi, 256);
    validate_layout(gplus, gminus, theta);
    finish(discretize(gspec), discretize(tspec));
}

void FiniteCuspKernel::validate_layout(const std::vector<cplx>& gamma_plus, const std::vector<cplx>& gamma_minus,
                                       const std::vector<cplx>& theta) const
{
    auto wind = [](const std::vector<cplx>& poly, cplx p) { return poly.empty() ? 0 : winding_number(poly, p); };
    std::ostringstream problems;
    for (double l : integrand_.lambdas) {
        const cplx pole = 1.0 / l;
        if (wind(gamma_plus, pole) + wind(gamma_minus, pole) != 1) {
            problems << " pole " << 1.0 / l << " not enclosed once by Gamma;";
        }
    }
    if (wind(theta, 0.0) != 1) {
        problems << " Theta does not enclose 0;";
    }
    if (wind(gamma_plus, 0.0) != 0) {
        problems << " Gamma+ encloses 0;";
    }
    for (const cplx& p : gamma_plus) {
        if (wind(theta, p) != 0) {
            problems << " Theta encloses part of Gamma+;";
            break;
        }
    }
    for (const cplx& p : gamma_minus) {
        if (std::abs(p) > 1e-12 && wind(theta, p) != 1) {
            problems << " Theta does not enclose Gamma-;";
            break;
        }
    }
    for (const cplx& p : theta) {
        if (wind(gamma_plus, p) != 0 || wind(gamma_minus, p) != 0) {
            problems << " Theta enters Gamma;";
            break;
        }
    }
    const std::string msg = problems.str();
    if (!msg.empty()) {
        throw ContourError("cusp kernel: invalid contour layout:" + msg);
    }
}

void FiniteCuspKernel::finish(const ContourNodes& gamma_z, const ContourNodes& theta_w)
{
    const double c = integrand_.c_N;
    gamma_ = gamma_z;
    theta_ = theta_w;
    gamma_factor_.resize(gamma_.size());
    theta_factor_.resize(theta_.size());
    for (std::size_t a = 0; a < gamma_.size(); ++a) {
        const cplx z = gamma_z.z[a];
        gamma_.z[a] = (z - c) / delta_;
        gamma_.weight[a] = gamma_z.weight[a] / delta_;
        gamma_factor_[a] = gamma_.weight[a] * std::exp(phase(z)) / two_pi_i;
    }
    for (std::size_t b = 0; b < theta_.size(); ++b) {
        const cplx w = theta_w.z[b];
        theta_.z[b] = (w - c) / delta_;
        theta_.weight[b] = theta_w.weight[b] / delta_;
        theta_factor_[b] = theta_.weight[b] * std::exp(-phase(w)) / two_pi_i;
    }
    double closest = std::numeric_limits<double>::infinity();
    cauchy_.resize(static_cast<Eigen::Index>(gamma_.size()), static_cast<Eigen::Index>(theta_.size()));
    for (std::size_t a = 0; a < gamma_.size(); ++a) {
        for (std::size_t b = 0; b < theta_.size(); ++b) {
            const cplx d = theta_.z[b] - gamma_.z[a];
            closest = std::min(closest, std::abs(d));
            cauchy_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = 1.0 / d;
        }
    }
    if (closest < 1e-3) {
        throw ContourError("cusp kernel: Gamma and Theta nodes nearly collide");
    }
}

Eigen::MatrixXd FiniteCuspKernel::matrix(const std::vector<double>& xs, const std::vector<double>& ys) const
{
    const auto nx = static_cast<Eigen::Index>(xs.size());
    const auto ny = static_cast<Eigen::Index>(ys.size());
    const auto mz = static_cast<Eigen::Index>(gamma_.size());
    const auto mw = static_cast<Eigen::Index>(theta_.size());
    Eigen::MatrixXcd A(nx, mz), B(mw, ny);
    for (Eigen::Index i = 0; i < nx; ++i) {
        for (Eigen::Index a = 0; a < mz; ++a) {
            A(i, a) = gamma_factor_[a] * std::exp(-xs[i] * gamma_.z[a]);
        }
    }
    for (Eigen::Index j = 0; j < ny; ++j) {
        for (Eigen::Index b = 0; b < mw; ++b) {
            B(b, j) = theta_factor_[b] * std::exp(ys[j] * theta_.z[b]);
        }
    }
    const Eigen::MatrixXcd K = A * (cauchy_ * B);
    imag_residue_ = K.imag().cwiseAbs().maxCoeff();
    return K.real();
}

double FiniteCuspKernel::operator()(double x, double y) const
{
    return matrix({x}, {y})(0, 0);
}

FiniteCuspKernel FiniteCuspKernel::refined() const
{
    CuspContourOptions o = options_;
    o.panel_nodes *= 2;
    o.local_nodes *= 2;
    o.circle_nodes *= 2;
    return FiniteCuspKernel(integrand_, sigma_N_, o);
}

double finite_kernel_cusp(const CuspKernelIntegrand& integrand, double sigma_N, double x, double y,
                          const CuspContourOptions& options)
{
    const FiniteCuspKernel k(integrand, sigma_N, options);
    const double v = k(x, y);
    const double fine = k.refined()(x, y);
    if (std::abs(v - fine) > 1e-8) {
        std::ostringstream msg;
        msg << "cusp kernel: node doubling changed the value by " << std::abs(v - fine) << " at (" << x << ", "
            << y << ")";
        throw ConvergenceError(msg.str());
    }
    return fine;
}

HardEdgeKernelSpec HardEdgeKernelSpec::from(const PopulationSpectrum& spec, int N, int alpha, double s)
{
    if (N <= 0 || N + alpha <= 0) {
        throw InvalidArgument("hard-edge kernel: need N > 0 and n = N + alpha > 0");
    }
    if (!(s > 0.0)) {
        throw InvalidArgument("hard-edge kernel: box s must be positive");
    }
    const int n = N + alpha;
    HardEdgeKernelSpec out;
    out.N = N;
    out.alpha = alpha;
    const PopulationSpectrum sized = spec.with_finite_n(FiniteN{N, n});
    out.multiplicity = sized.multiplicities();
    for (const Atom& a : spec.atoms()) {
        out.lambdas.push_back(a.lambda);
    }
    // circles straddling the Bessel saddle radius 2 sqrt(s)
    out.r = std::max(0.4, 1.6 * std::sqrt(s));
    out.R = std::max(0.625, 2.5 * std::sqrt(s));
    out.validate();
    return out;
}

double HardEdgeKernelSpec::sigma_N() const
{
    double s = 0.0;
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        s += multiplicity[j] / lambdas[j];
    }
    return 4.0 * s / N;
}

double HardEdgeKernelSpec::zeta_N() const
{
    double s = 0.0;
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        s += multiplicity[j] / (lambdas[j] * lambdas[j]);
    }
    return 8.0 * s / N;
}

void HardEdgeKernelSpec::validate() const
{
    if (lambdas.empty() || lambdas.size() != multiplicity.size() || N <= 0) {
        throw InvalidArgument("hard-edge kernel: lambdas and multiplicities must match");
    }
    int total = 0;
    double lmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        if (!(lambdas[j] > 0.0) || multiplicity[j] < 1) {
            throw InvalidArgument("hard-edge kernel: lambdas must be positive with positive multiplicities");
        }
        total += multiplicity[j];
        lmin = std::min(lmin, lambdas[j]);
    }
    if (total != N + alpha) {
        throw InvalidArgument("hard-edge kernel: multiplicities must add up to N + alpha");
    }
    if (nodes < 16) {
        throw InvalidArgument("hard-edge kernel: at least 16 nodes per circle");
    }
    const double limit = N * sigma_N() * lmin / 2.0;
    if (!(r > 0.0) || !(R > r) || !(R < limit)) {
        std::ostringstream msg;
        msg << "hard-edge kernel: radii must satisfy 0 < r < R < " << limit;
        throw InvalidArgument(msg.str());
    }
}

FiniteHardKernel::FiniteHardKernel(const HardEdgeKernelSpec& spec) : spec_(spec)
{
    spec_.validate();
    const int M = spec_.nodes;
    const double scale = spec_.N * spec_.sigma_N();
    // log prod_j (lambda_j - z/(N sigma_N))^{m_j} relative to z = 0, principal logs per factor
    auto log_p = [&](cplx z) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < spec_.lambdas.size(); ++j) {
            s += static_cast<double>(spec_.multiplicity[j]) * std::log(1.0 - z / (scale * spec_.lambdas[j]));
        }
        return s;
    };
    z_.resize(M);
    w_.resize(M);
    z_factor_.resize(M);
    w_factor_.resize(M);
    for (int k = 0; k < M; ++k) {
        const double theta = 2.0 * std::numbers::pi * (k + 0.5) / M;
        z_[k] = std::polar(spec_.r, theta);
        w_[k] = std::polar(spec_.R, theta);
        z_factor_[k] = std::pow(z_[k], spec_.alpha) * std::exp(-log_p(z_[k])) / static_cast<double>(M);
        w_factor_[k] = std::pow(w_[k], -spec_.alpha) * std::exp(log_p(w_[k])) / static_cast<double>(M);
    }
    cauchy_.resize(M, M);
    for (int k = 0; k < M; ++k) {
        for (int l = 0; l < M; ++l) {
            cauchy_(k, l) = 1.0 / (z_[k] - w_[l]);
        }
    }
}

Eigen::MatrixXd FiniteHardKernel::matrix(const std::vector<double>& xs, const std::vector<double>& ys) const
{
    const auto nx = static_cast<Eigen::Index>(xs.size());
    const auto ny = static_cast<Eigen::Index>(ys.size());
    const auto M = static_cast<Eigen::Index>(z_.size());
    Eigen::MatrixXcd A(nx, M), B(M, ny);
    for (Eigen::Index i = 0; i < nx; ++i) {
        for (Eigen::Index k = 0; k < M; ++k) {
            A(i, k) = z_factor_[k] * std::exp(-xs[i] / z_[k]);
        }
    }
    for (Eigen::Index j = 0; j < ny; ++j) {
        for (Eigen::Index l = 0; l < M; ++l) {
            B(l, j) = w_factor_[l] * std::exp(ys[j] / w_[l]);
        }
    }
    return (A * (cauchy_ * B)).real();
}

double FiniteHardKernel::operator()(double x, double y) const
{
    return matrix({x}, {y})(0, 0);
}

FiniteHardKernel FiniteHardKernel::refined() const
{
    HardEdgeKernelSpec s = spec_;
    s.nodes *= 2;
    return FiniteHardKernel(s);
}

double finite_kernel_hard(const HardEdgeKernelSpec& spec, double x, double y)
{
    const FiniteHardKernel k(spec);
    const double v = k(x, y);
    const double fine = k.refined()(x, y);
    if (std::abs(v - fine) > 1e-8) {
        std::ostringstream msg;
        msg << "hard-edge kernel: node doubling changed the value by " << std::abs(v - fine);
        throw ConvergenceError(msg.str());
    }
    return fine;
}

}  // namespace rmt
