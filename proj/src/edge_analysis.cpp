#include "rmt/edge_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rmt/errors.hpp"

namespace rmt {

namespace {

// Sum of magnitudes of the terms of g^{(k)}, used to scale tolerances.
double term_scale(const PopulationSpectrum& spec, double m, int k, double gam)
{
    double s = 1.0 / std::pow(std::abs(m), k + 1);
    for (const Atom& a : spec.atoms()) {
        s += gam * a.weight * std::pow(std::abs(a.lambda / (1.0 - m * a.lambda)), k + 1);
    }
    double fact = 1.0;
    for (int j = 2; j <= k; ++j) {
        fact *= j;
    }
    return fact * s;
}

// Endpoints of the component of D containing m.
std::pair<double, double> pole_gap(const PopulationSpectrum& spec, double m)
{
    std::vector<double> breaks{0.0};
    for (double p : spec.poles()) {
        breaks.push_back(p);
    }
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (double b : breaks) {
        if (b < m) {
            lo = b;
        } else if (b > m) {
            hi = std::min(hi, b);
        } else {
            throw InvalidArgument("edge_analysis: seed lies on a pole");
        }
    }
    return {lo, hi};
}

bool cusp_flag(double c, double g2, double g3)
{
    return std::abs(g2) < 1e-8 * (1.0 + std::abs(g3) * std::abs(c));
}

}  // namespace

CriticalPointScan find_critical_points(const PopulationSpectrum& spec, const ScanOptions& options,
                                       bool finite_n_mode)
{
    CriticalPointScan scan;
    for (const CriticalRoot& r : critical_roots(spec, options, finite_n_mode, &scan.warnings)) {
        CriticalPoint p;
        p.m = r.m;
        p.g2 = r.g2;
        p.g3 = r.g3;
        p.kind = (r.double_root || cusp_flag(r.m, r.g2, r.g3)) ? CriticalKind::cusp_candidate
                                                                : CriticalKind::soft_edge;
        scan.points.push_back(p);
    }
    return scan;
}

CuspDescriptor classify_cusp(const PopulationSpectrum& spec, double c, bool finite_n_mode)
{
    const double gam = spec.aspect_ratio(finite_n_mode);
    const double g1 = g_eval(spec, c, 1, finite_n_mode);
    const double g2 = g_eval(spec, c, 2, finite_n_mode);
    const double g3 = g_eval(spec, c, 3, finite_n_mode);
    if (std::abs(g1) > 1e-10 * term_scale(spec, c, 1, gam) || !cusp_flag(c, g2, g3)) {
        throw InvalidArgument("classify_cusp: g' and g'' do not both vanish at c");
    }
    if (!(g3 > 0.0)) {
        throw NumericalError("classify_cusp: g''' is not positive at the cusp preimage");
    }
    CuspDescriptor d;
    d.c = c;
    d.a = g_eval(spec, c, 0, finite_n_mode);
    d.g3 = g3;
    d.sigma_limit = std::pow(6.0 / g3, 0.25);
    d.cube_root_coeff = std::sqrt(3.0) / (2.0 * std::numbers::pi) * std::cbrt(6.0 / g3);
    d.pole_distance = std::numeric_limits<double>::infinity();
    for (double p : spec.poles()) {
        d.pole_distance = std::min(d.pole_distance, std::abs(c - p));
    }
    d.regular = d.pole_distance > 1e-3;
    return d;
}

std::vector<SoftEdgeDescriptor> soft_edges(const PopulationSpectrum& spec, const ScanOptions& options,
                                           bool finite_n_mode)
{
    std::vector<SoftEdgeDescriptor> out;
    for (const CriticalPoint& p : find_critical_points(spec, options, finite_n_mode).points) {
        if (p.kind != CriticalKind::soft_edge) {
            continue;
        }
        SoftEdgeDescriptor e;
        e.c = p.m;
        e.a = g_eval(spec, p.m, 0, finite_n_mode);
        e.g2 = p.g2;
        // g'' < 0 where the support extends to the right of the edge
        e.side = p.g2 < 0.0 ? EdgeSide::left : EdgeSide::right;
        e.sqrt_coeff = std::sqrt(2.0 / std::abs(p.g2)) / std::numbers::pi;
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const SoftEdgeDescriptor& a, const SoftEdgeDescriptor& b) {
        return a.a < b.a;
    });
    return out;
}

HardEdgeConstants hard_edge(const PopulationSpectrum& spec, int N, int alpha)
{
    if (N <= 0 || N + alpha <= 0) {
        throw InvalidArgument("hard_edge: need N > 0 and n = N + alpha > 0");
    }
    HardEdgeConstants h;
    h.N = N;
    h.alpha = alpha;
    const double gam = spec.gamma();
    double inv1 = 0.0;
    double inv2 = 0.0;
    for (const Atom& a : spec.atoms()) {
        inv1 += a.weight / a.lambda;
        inv2 += a.weight / (a.lambda * a.lambda);
    }
    h.g1_inf = 1.0 - gam;
    h.g2_inf = -2.0 * gam * inv1;
    h.present = std::abs(gam - 1.0) < 1e-12;
    h.blowup_coeff = std::sqrt(-h.g2_inf / 2.0) / std::numbers::pi;
    const double n = N + alpha;
    h.sigma_N = 4.0 / N * n * inv1;
    h.zeta_N = 8.0 / N * n * inv2;
    return h;
}

FiniteNCuspSequence finite_n_cusp(const PopulationSpectrum& spec, double c_seed)
{
    if (!spec.finite_n()) {
        throw InvalidArgument("finite_n_cusp: spectrum has no finite_n data");
    }
    const double gam = spec.aspect_ratio(true);
    const auto [lo, hi] = pole_gap(spec, c_seed);
    double c = c_seed;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        const double g2 = g_eval(spec, c, 2, true);
        const double g3 = g_eval(spec, c, 3, true);
        const double step = g2 / g3;
        const double next = c - step;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            throw ConvergenceError("finite_n_cusp: Newton iterate left the pole gap of the seed");
        }
        c = next;
        if (std::abs(step) <= 1e-15 * std::abs(c)) {
            converged = true;
            break;
        }
    }
    FiniteNCuspSequence seq;
    seq.N = spec.finite_n()->N;
    seq.c_N = c;
    seq.g2_residual = std::abs(g_eval(spec, c, 2, true));
    if (!converged || seq.g2_residual > 1e-12 * term_scale(spec, c, 2, gam)) {
        throw ConvergenceError("finite_n_cusp: Newton on g_N'' did not converge, |g_N''| = " +
                               std::to_string(seq.g2_residual));
    }
    seq.g3_N = g_eval(spec, c, 3, true);
    if (!(seq.g3_N > 0.0)) {
        throw ConvergenceError("finite_n_cusp: g_N''' is not positive at c_N");
    }
    seq.a_N = g_eval(spec, c, 0, true);
    seq.sigma_N = std::pow(6.0 / seq.g3_N, 0.25);
    seq.kappa_N = std::sqrt(static_cast<double>(seq.N)) * g_eval(spec, c, 1, true);
    return seq;
}

void attach_finite_n(CuspDescriptor& cusp, const FiniteNCuspSequence& seq)
{
    cusp.kappa = seq.kappa_N;
    cusp.tau = -seq.kappa_N * std::sqrt(6.0 / cusp.g3);
}

namespace {

double limiting_cusp_seed(const PopulationSpectrum& spec)
{
    const CriticalPointScan scan = find_critical_points(spec);
    const CriticalPoint* best = nullptr;
    for (const CriticalPoint& p : scan.points) {
        if (p.kind == CriticalKind::cusp_candidate) {
            best = &p;
        }
    }
    if (best != nullptr) {
        return best->m;
    }
    // nearly-cusp template: take the zero of g'' where |g'| is smallest
    double seed = std::numeric_limits<double>::quiet_NaN();
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < scan.points.size(); ++i) {
        const double mid = 0.5 * (scan.points[i].m + scan.points[i + 1].m);
        const double v = std::abs(g_eval(spec, mid, 1));
        if (v < smallest) {
            smallest = v;
            seed = mid;
        }
    }
    if (std::isnan(seed)) {
        throw InvalidArgument("tune_exact_cusp: template has no cusp candidate to seed from");
    }
    return seed;
}

}  // namespace

TunedCusp tune_exact_cusp(const PopulationSpectrum& templ, int N, std::size_t atom_index, TuneParameter parameter)
{
    const std::vector<Atom>& base = templ.atoms();
    if (base.size() < 2) {
        throw InvalidArgument("tune_exact_cusp: template needs at least two atoms");
    }
    if (atom_index >= base.size()) {
        throw InvalidArgument("tune_exact_cusp: atom index out of range");
    }
    if (N <= 0) {
        throw InvalidArgument("tune_exact_cusp: N must be positive");
    }
    const int n = static_cast<int>(std::lround(templ.gamma() * N));
    if (n < 1) {
        throw InvalidArgument("tune_exact_cusp: n = round(gamma N) must be positive");
    }
    const double gam = static_cast<double>(n) / N;
    std::vector<Atom> atoms = base;
    if (parameter == TuneParameter::location) {
        // integer multiplicities closest to the template weights
        std::vector<int> counts;
        int total = 0;
        for (const Atom& a : base) {
            counts.push_back(std::max(1, static_cast<int>(std::lround(a.weight * n))));
            total += counts.back();
        }
        counts[atom_index] += n - total;
        if (counts[atom_index] < 1) {
            throw InvalidArgument("tune_exact_cusp: cannot assign integer multiplicities at this N");
        }
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            atoms[j].weight = static_cast<double>(counts[j]) / n;
        }
    }
    const double w0 = base[atom_index].weight;
    double c = limiting_cusp_seed(templ);
    double t = parameter == TuneParameter::weight ? w0 : base[atom_index].lambda;

    auto apply = [&](double value) {
        std::vector<Atom> out = atoms;
        if (parameter == TuneParameter::weight) {
            for (std::size_t j = 0; j < out.size(); ++j) {
                out[j].weight = j == atom_index ? value : base[j].weight * (1.0 - value) / (1.0 - w0);
            }
        } else {
            out[atom_index].lambda = value;
        }
        return out;
    };
    // F1 = g_N'(c), F2 = g_N''(c)/2 and their partial derivatives
    auto evaluate = [&](double value, double m, double F[2], double J[2][2]) {
        const std::vector<Atom> cur = apply(value);
        double s2 = 0.0, s3 = 0.0, s4 = 0.0;
        for (const Atom& a : cur) {
            const double h = a.lambda / (1.0 - m * a.lambda);
            s2 += a.weight * h * h;
            s3 += a.weight * h * h * h;
            s4 += a.weight * h * h * h * h;
        }
        F[0] = -1.0 / (m * m) + gam * s2;
        F[1] = 1.0 / (m * m * m) + gam * s3;
        J[0][1] = 2.0 / (m * m * m) + 2.0 * gam * s3;
        J[1][1] = -3.0 / (m * m * m * m) + 3.0 * gam * s4;
        const Atom& k = cur[atom_index];
        const double d = 1.0 - m * k.lambda;
        if (parameter == TuneParameter::weight) {
            double r2 = 0.0, r3 = 0.0;
            for (std::size_t j = 0; j < cur.size(); ++j) {
                if (j == atom_index) {
                    continue;
                }
                const double h = cur[j].lambda / (1.0 - m * cur[j].lambda);
                r2 += base[j].weight * h * h;
                r3 += base[j].weight * h * h * h;
            }
            const double hk = k.lambda / d;
            J[0][0] = gam * (hk * hk - r2 / (1.0 - w0));
            J[1][0] = gam * (hk * hk * hk - r3 / (1.0 - w0));
        } else {
            J[0][0] = gam * k.weight * 2.0 * k.lambda / (d * d * d);
            J[1][0] = gam * k.weight * 3.0 * k.lambda * k.lambda / (d * d * d * d);
        }
    };
    auto scale_of = [&](double value, double m) {
        const PopulationSpectrum s(apply(value), templ.gamma());
        return std::pair{term_scale(s, m, 1, gam), term_scale(s, m, 2, gam)};
    };

    double F[2], J[2][2];
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        evaluate(t, c, F, J);
        const auto [s1, s2] = scale_of(t, c);
        if (std::abs(F[0]) < 1e-14 * s1 && std::abs(F[1]) < 1e-14 * s2) {
            converged = true;
            break;
        }
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (det == 0.0 || !std::isfinite(det)) {
            break;
        }
        double dt = (F[0] * J[1][1] - F[1] * J[0][1]) / det;
        double dc = (J[0][0] * F[1] - J[1][0] * F[0]) / det;
        // damp so the iterate stays admissible
        for (int halve = 0; halve < 60; ++halve) {
            const double nt = t - dt;
            const double nc = c - dc;
            bool ok = std::isfinite(nt) && std::isfinite(nc) && nc > 0.0;
            if (ok && parameter == TuneParameter::weight) {
                ok = nt > 0.0 && nt < 1.0;
            }
            if (ok && parameter == TuneParameter::location) {
                ok = nt > 0.0 && (atom_index == 0 || nt > atoms[atom_index - 1].lambda) &&
                     (atom_index + 1 == atoms.size() || nt < atoms[atom_index + 1].lambda);
            }
            if (ok) {
                for (const Atom& a : apply(nt)) {
                    ok = ok && std::abs(nc * a.lambda - 1.0) > 1e-6;
                }
            }
            if (ok) {
                break;
            }
            dt *= 0.5;
            dc *= 0.5;
        }
        const double prev_c = c;
        t -= dt;
        c -= dc;
        if (std::abs(dt) < 1e-16 * std::abs(t) && std::abs(dc) < 1e-16 * std::abs(prev_c)) {
            evaluate(t, c, F, J);
            const auto [s1b, s2b] = scale_of(t, c);
            converged = std::abs(F[0]) < 1e-12 * s1b && std::abs(F[1]) < 1e-12 * s2b;
            break;
        }
    }
    evaluate(t, c, F, J);
    if (!converged) {
        throw ConvergenceError("tune_exact_cusp: Newton failed, residuals g' = " + std::to_string(F[0]) +
                               ", g''/2 = " + std::to_string(F[1]));
    }
    std::vector<Atom> tuned = apply(t);
    if (parameter == TuneParameter::weight) {
        // restore an exact unit total after rescaling roundoff
        double total = 0.0;
        for (const Atom& a : tuned) {
            total += a.weight;
        }
        for (Atom& a : tuned) {
            a.weight /= total;
        }
    }
    TunedCusp out{PopulationSpectrum(tuned, gam, FiniteN{N, n}), {}, 0.0, 0.0};
    out.sequence = finite_n_cusp(out.spectrum, c);
    out.residual_g1 = std::abs(g_eval(out.spectrum, out.sequence.c_N, 1, true));
    out.residual_g2 = std::abs(g_eval(out.spectrum, out.sequence.c_N, 2, true));
    return out;
}

ExactCusp exact_cusp_gamma(const std::vector<Atom>& atoms, double c_seed)
{
    // g' = g'' = 0 with gamma eliminated: S2(c) + c S3(c) = 0, gamma = 1/(c^2 S2(c))
    const PopulationSpectrum probe(atoms, 1.0);
    const auto [lo, hi] = pole_gap(probe, c_seed);
    auto h = [&](double c, double* dh) {
        double s2 = 0.0, s3 = 0.0, s4 = 0.0;
        for (const Atom& a : atoms) {
            const double q = a.lambda / (1.0 - c * a.lambda);
            s2 += a.weight * q * q;
            s3 += a.weight * q * q * q;
            s4 += a.weight * q * q * q * q;
        }
        if (dh) {
            *dh = 2.0 * s3 + s3 + 3.0 * c * s4;
        }
        return s2 + c * s3;
    };
    double c = c_seed;
    for (int it = 0; it < 200; ++it) {
        double d = 0.0;
        const double v = h(c, &d);
        double next = c - v / d;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (c + (next <= lo ? lo : hi));
        }
        if (std::abs(next - c) <= 1e-16 * std::abs(c)) {
            c = next;
            break;
        }
        c = next;
    }
    double s2 = 0.0;
    for (const Atom& a : atoms) {
        const double q = a.lambda / (1.0 - c * a.lambda);
        s2 += a.weight * q * q;
    }
    ExactCusp out{1.0 / (c * c * s2), c};
    const PopulationSpectrum spec(atoms, out.gamma);
    const double g1 = g_eval(spec, c, 1);
    const double g2 = g_eval(spec, c, 2);
    if (std::abs(g1) > 1e-12 * term_scale(spec, c, 1, out.gamma) ||
        std::abs(g2) > 1e-10 * term_scale(spec, c, 2, out.gamma)) {
        throw ConvergenceError("exact_cusp_gamma: no exact cusp found near the seed");
    }
    return out;
}

}  // namespace rmt
