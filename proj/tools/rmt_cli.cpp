#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rmt/edge_analysis.hpp"
#include "rmt/errors.hpp"
#include "rmt/finite_kernels.hpp"
#include "rmt/fredholm.hpp"
#include "rmt/montecarlo.hpp"
#include "rmt/parallel.hpp"
#include "rmt/pearcey.hpp"
#include "rmt/spectral_model.hpp"
#include "rmt/spectrum_json.hpp"
#include "validation.hpp"

using json = nlohmann::json;
using namespace rmt;

namespace {

constexpr const char* version = "1.0.0";

const std::vector<std::string> commands = {"density", "support", "cusp-scan", "pearcey", "hard-edge", "simulate",
                                           "validate"};

// Every knob with its default, per command.
json defaults_for(const std::string& command)
{
    json d = {{"command", command}, {"spec_path", ""}, {"output_path", ""}};
    if (command == "density") {
        d.update({{"range", "auto"}, {"points", 800}, {"finite_n", false}});
    } else if (command == "support") {
        d.update({{"points_per_interval", 2048}, {"finite_n", false}});
    } else if (command == "cusp-scan") {
        d.update({{"points_per_interval", 2048},
                  {"finite_n", false},
                  {"kernel_N", 0},
                  {"tune_atom", -1},
                  {"grid", "-3:3:13"},
                  {"contour_strategy", "saddle"},
                  {"panel_nodes", 8},
                  {"local_nodes", 32},
                  {"cutoff", 40.0}});
    } else if (command == "pearcey") {
        d.update({{"tau", 0.0},
                  {"grid", "-3:3:13"},
                  {"representation", "functions"},
                  {"gap", false},
                  {"interval", "-1:1"},
                  {"order", 40},
                  {"truncation", 8.0},
                  {"nodes", 200}});
    } else if (command == "hard-edge") {
        d.update({{"alpha", 0},
                  {"N", 100},
                  {"s", "1:9:9"},
                  {"expansion", false},
                  {"kernel", false},
                  {"grid", "0.5:4:8"},
                  {"order", 40}});
    } else if (command == "simulate") {
        d.update({{"mode", "global"},
                  {"N", 100},
                  {"n", 0},
                  {"reps", 100},
                  {"seed", 1},
                  {"s", "0:4:9"},
                  {"window", "-2:2"}});
    } else if (command == "validate") {
        d.update({{"quick", false}});
    }
    return d;
}

void merge_config(json& cfg, const json& extra, const std::string& where)
{
    if (!extra.is_object()) {
        throw InvalidArgument(where + ": configuration must be a JSON object");
    }
    for (const auto& item : extra.items()) {
        if (!cfg.contains(item.key())) {
            throw InvalidArgument(where + ": unknown key \"" + item.key() + "\" for command " +
                                  cfg["command"].get<std::string>());
        }
        const json& current = cfg[item.key()];
        const json& v = item.value();
        const bool same_kind = (current.is_boolean() && v.is_boolean()) || (current.is_string() && v.is_string()) ||
                               (current.is_number_integer() && v.is_number_integer()) ||
                               (current.is_number_float() && v.is_number());
        if (!same_kind) {
            throw InvalidArgument(where + ": key \"" + item.key() + "\" has the wrong type");
        }
        cfg[item.key()] = current.is_number_float() ? json(v.get<double>()) : v;
    }
}

std::vector<double> parse_list(const std::string& text, std::size_t parts, const std::string& what)
{
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw InvalidArgument(what + ": cannot parse \"" + text + "\"");
        }
    }
    if (out.size() != parts) {
        throw InvalidArgument(what + ": expected " + std::to_string(parts) + " colon-separated numbers");
    }
    return out;
}

std::vector<double> parse_grid(const std::string& text, const std::string& what)
{
    const std::vector<double> v = parse_list(text, 3, what);
    const int count = static_cast<int>(v[2]);
    if (count < 1 || count != v[2] || !(v[0] <= v[1]) || (count == 1 && v[0] != v[1])) {
        throw InvalidArgument(what + ": need a <= b and a positive integer count");
    }
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(count == 1 ? v[0] : v[0] + (v[1] - v[0]) * i / (count - 1));
    }
    return out;
}

std::string fnv1a(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

struct Context {
    json cfg;
    std::optional<PopulationSpectrum> spec;
    std::ostream* out = &std::cout;
    std::ofstream file;

    template <class T>
    T get(const std::string& key) const
    {
        return cfg.at(key).get<T>();
    }

    const PopulationSpectrum& spectrum() const
    {
        if (!spec) {
            throw InvalidArgument(cfg["command"].get<std::string>() + " needs --spec");
        }
        return *spec;
    }

    json provenance() const
    {
        json effective = cfg;
        effective.erase("output_path");
        effective.erase("spec_path");
        effective["spectrum"] = spec ? spectrum_to_json(*spec) : json(nullptr);
        json p = {{"artifact", "rmt"}, {"version", version}, {"command", cfg["command"]},
                  {"config_hash", fnv1a(effective.dump())}};
        p["seed"] = cfg.contains("seed") ? cfg["seed"] : json(nullptr);
        return p;
    }

    void csv_header(const std::string& columns)
    {
        *out << "# " << provenance().dump() << "\n" << columns << "\n";
    }

    void emit_json(json body)
    {
        body["provenance"] = provenance();
        *out << body.dump(2) << "\n";
    }
};

void positive_int(const Context& c, const std::string& key, int minimum = 1)
{
    if (c.get<int>(key) < minimum) {
        throw InvalidArgument(key + " must be at least " + std::to_string(minimum));
    }
}

json support_json(const SupportDescription& s)
{
    json iv = json::array();
    for (const SupportInterval& i : s.intervals) {
        iv.push_back({{"left", i.left},
                      {"right", i.right},
                      {"left_preimage", std::isnan(i.left_preimage) ? json(nullptr) : json(i.left_preimage)},
                      {"right_preimage", i.right_preimage}});
    }
    return {{"intervals", iv}, {"hard_edge", s.hard_edge}, {"warnings", s.warnings}};
}

int cmd_density(Context& c)
{
    positive_int(c, "points", 2);
    const PopulationSpectrum& spec = c.spectrum();
    const bool fn = c.get<bool>("finite_n");
    double a = 0.0;
    double b = 0.0;
    if (c.get<std::string>("range") == "auto") {
        const SupportDescription s = support(spec, {}, fn);
        b = 1.05 * s.intervals.back().right;
    } else {
        const std::vector<double> r = parse_list(c.get<std::string>("range"), 2, "range");
        a = r[0];
        b = r[1];
        if (!(a < b) || !(b > 0.0)) {
            throw InvalidArgument("range: need a < b with b > 0");
        }
    }
    const int points = c.get<int>("points");
    // the density is undefined at 0; a nonpositive start moves to the first half-step
    if (a <= 0.0) {
        a = std::max(a, 0.0) + (b - std::max(a, 0.0)) / (2.0 * points);
    }
    const DensityCurve curve = density_grid(spec, a, b, points, fn);
    c.csv_header("x,rho");
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        *c.out << curve.grid[i] << "," << curve.values[i] << "\n";
    }
    return 0;
}

int cmd_support(Context& c)
{
    positive_int(c, "points_per_interval", 16);
    const bool fn = c.get<bool>("finite_n");
    const PopulationSpectrum& spec = c.spectrum();
    const SupportDescription s = support(spec, {c.get<int>("points_per_interval")}, fn);
    json body = support_json(s);
    body["mass_at_zero"] = std::max(1.0 - spec.aspect_ratio(fn), 0.0);
    c.emit_json(body);
    return 0;
}

int cmd_cusp_scan(Context& c)
{
    positive_int(c, "points_per_interval", 16);
    positive_int(c, "kernel_N", 0);
    positive_int(c, "panel_nodes", 2);
    positive_int(c, "local_nodes", 16);
    const std::string strategy = c.get<std::string>("contour_strategy");
    if (strategy != "saddle" && strategy != "circles") {
        throw InvalidArgument("contour_strategy must be saddle or circles");
    }
    if (!(c.get<double>("cutoff") > 0.0)) {
        throw InvalidArgument("cutoff must be positive");
    }
    const std::vector<double> grid = parse_grid(c.get<std::string>("grid"), "grid");
    const PopulationSpectrum& spec = c.spectrum();
    const bool fn = c.get<bool>("finite_n");
    const ScanOptions scan{c.get<int>("points_per_interval")};

    if (c.get<int>("kernel_N") > 0) {
        const int atoms = static_cast<int>(spec.atoms().size());
        int atom = c.get<int>("tune_atom");
        atom = atom < 0 ? atoms - 1 : atom;
        if (atom >= atoms) {
            throw InvalidArgument("tune_atom out of range");
        }
        const TunedCusp t =
            tune_exact_cusp(spec, c.get<int>("kernel_N"), static_cast<std::size_t>(atom), TuneParameter::location);
        CuspContourOptions o;
        o.strategy = strategy == "saddle" ? CuspContourStrategy::saddle : CuspContourStrategy::circles;
        o.panel_nodes = c.get<int>("panel_nodes");
        o.local_nodes = c.get<int>("local_nodes");
        o.cutoff = c.get<double>("cutoff");
        for (double v : grid) {
            o.box = std::max(o.box, std::abs(v));
        }
        const FiniteCuspKernel k(CuspKernelIntegrand::from(t.spectrum, t.sequence), t.sequence.sigma_N, o);
        const Eigen::MatrixXd K = k.matrix(grid, grid);
        c.csv_header("x,y,K");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (std::size_t j = 0; j < grid.size(); ++j) {
                *c.out << grid[i] << "," << grid[j] << "," << K(i, j) << "\n";
            }
        }
        return 0;
    }

    const CriticalPointScan scan_result = find_critical_points(spec, scan, fn);
    json points = json::array();
    json cusps = json::array();
    for (const CriticalPoint& p : scan_result.points) {
        const bool cusp = p.kind == CriticalKind::cusp_candidate;
        points.push_back({{"m", p.m}, {"kind", cusp ? "cusp_candidate" : "soft_edge"}, {"g2", p.g2}, {"g3", p.g3}});
        if (cusp) {
            CuspDescriptor d = classify_cusp(spec, p.m, fn);
            json cj = {{"a", d.a},
                       {"c", d.c},
                       {"g3", d.g3},
                       {"sigma_limit", d.sigma_limit},
                       {"cube_root_coeff", d.cube_root_coeff},
                       {"pole_distance", d.pole_distance},
                       {"regular", d.regular}};
            if (spec.finite_n() && !fn) {
                const FiniteNCuspSequence seq = finite_n_cusp(spec, d.c);
                attach_finite_n(d, seq);
                cj["finite_n"] = {{"N", seq.N}, {"c_N", seq.c_N}, {"a_N", seq.a_N}, {"sigma_N", seq.sigma_N},
                                  {"kappa_N", seq.kappa_N}, {"tau", *d.tau}};
            }
            cusps.push_back(cj);
        }
    }
    json edges = json::array();
    for (const SoftEdgeDescriptor& e : soft_edges(spec, scan, fn)) {
        edges.push_back({{"a", e.a},
                         {"c", e.c},
                         {"g2", e.g2},
                         {"side", e.side == EdgeSide::left ? "left" : "right"},
                         {"sqrt_coeff", e.sqrt_coeff}});
    }
    json body = {{"critical_points", points}, {"cusps", cusps}, {"soft_edges", edges},
                 {"support", support_json(support(spec, scan, fn))}, {"warnings", scan_result.warnings}};
    const double gamma = spec.aspect_ratio(fn);
    if (std::abs(gamma - 1.0) < 1e-12) {
        const HardEdgeConstants h = hard_edge(spec, spec.finite_n() ? spec.finite_n()->N : 100, 0);
        body["hard_edge"] = {{"present", h.present}, {"g2_inf", h.g2_inf}, {"blowup_coeff", h.blowup_coeff}};
    } else {
        body["hard_edge"] = {{"present", false}};
    }
    c.emit_json(body);
    return 0;
}

int cmd_pearcey(Context& c)
{
    positive_int(c, "order", 8);
    positive_int(c, "nodes", 16);
    PearceyParams p;
    p.tau = c.get<double>("tau");
    p.truncation = c.get<double>("truncation");
    p.nodes = c.get<int>("nodes");
    p.validate();
    if (c.get<bool>("gap")) {
        const std::vector<double> iv = parse_list(c.get<std::string>("interval"), 2, "interval");
        const GapResult g = pearcey_gap(p.tau, iv[0], iv[1], c.get<int>("order"));
        c.csv_header("s,t,tau,det");
        *c.out << iv[0] << "," << iv[1] << "," << p.tau << "," << g.value << "\n";
        return 0;
    }
    const std::string rep = c.get<std::string>("representation");
    if (rep != "functions" && rep != "contour") {
        throw InvalidArgument("representation must be functions or contour");
    }
    const std::vector<double> grid = parse_grid(c.get<std::string>("grid"), "grid");
    const PearceyKernel k(p);
    const Eigen::MatrixXd K =
        k.matrix(grid, grid, rep == "functions" ? PearceyRepresentation::functions : PearceyRepresentation::contour);
    c.csv_header("x,y,K");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            *c.out << grid[i] << "," << grid[j] << "," << K(i, j) << "\n";
        }
    }
    return 0;
}

int cmd_hard_edge(Context& c)
{
    positive_int(c, "N", 1);
    positive_int(c, "order", 8);
    const int N = c.get<int>("N");
    const int alpha = c.get<int>("alpha");
    if (N + alpha <= 0) {
        throw InvalidArgument("need N + alpha > 0");
    }
    if (!c.spec) {
        c.spec = PopulationSpectrum({{1.0, 1.0}}, 1.0);
    }
    const PopulationSpectrum& spec = *c.spec;
    const HardEdgeConstants h = hard_edge(spec, N, alpha);
    const int order = c.get<int>("order");
    if (c.get<bool>("expansion")) {
        const std::vector<double> ss = parse_grid(c.get<std::string>("s"), "s");
        for (double s : ss) {
            if (!(s > 0.0)) {
                throw InvalidArgument("s values must be positive");
            }
        }
        c.csv_header("s,F_alpha,correction,prediction,finiteN_det,residual");
        for (double s : ss) {
            const HardEdgePrediction t = hard_edge_terms(alpha, s, N, h.sigma_N, h.zeta_N, order);
            const FiniteHardKernel k(HardEdgeKernelSpec::from(spec, N, alpha, s));
            KernelEvaluator e;
            e.batch = [&k](const std::vector<double>& x, const std::vector<double>& y) { return k.matrix(x, y); };
            const double det = fredholm_det(e, 0.0, s, order).value;
            *c.out << s << "," << t.F << "," << t.correction << "," << t.prediction << "," << det << ","
                   << det - t.prediction << "\n";
        }
        return 0;
    }
    if (c.get<bool>("kernel")) {
        const std::vector<double> grid = parse_grid(c.get<std::string>("grid"), "grid");
        const FiniteHardKernel k(HardEdgeKernelSpec::from(spec, N, alpha, grid.back()));
        const Eigen::MatrixXd K = k.matrix(grid, grid);
        c.csv_header("x,y,K");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (std::size_t j = 0; j < grid.size(); ++j) {
                *c.out << grid[i] << "," << grid[j] << "," << K(i, j) << "\n";
            }
        }
        return 0;
    }
    c.emit_json({{"present", h.present},
                 {"g1_inf", h.g1_inf},
                 {"g2_inf", h.g2_inf},
                 {"blowup_coeff", h.blowup_coeff},
                 {"sigma_N", h.sigma_N},
                 {"zeta_N", h.zeta_N},
                 {"N", h.N},
                 {"alpha", h.alpha},
                 {"correction_coeff", alpha * h.zeta_N / (h.sigma_N * h.sigma_N)}});
    return 0;
}

int cmd_simulate(Context& c)
{
    positive_int(c, "N", 1);
    positive_int(c, "n", 0);
    positive_int(c, "reps", 1);
    if (c.get<std::int64_t>("seed") < 0) {
        throw InvalidArgument("seed must be nonnegative");
    }
    const std::string mode = c.get<std::string>("mode");
    if (mode != "hard-edge" && mode != "cusp" && mode != "global") {
        throw InvalidArgument("mode must be hard-edge, cusp or global");
    }
    const PopulationSpectrum& base = c.spectrum();
    const int N = c.get<int>("N");
    int n = c.get<int>("n");
    if (n == 0) {
        n = base.finite_n() ? base.finite_n()->n : static_cast<int>(std::lround(base.gamma() * N));
    }
    const PopulationSpectrum spec = base.with_finite_n(FiniteN{N, n});
    SimulationConfig sc;
    sc.N = N;
    sc.reps = c.get<int>("reps");
    sc.seed = c.get<std::uint64_t>("seed");
    sc.lambdas = expand_population(spec);
    json summary = {{"N", N}, {"n", n}, {"reps", sc.reps}};
    std::vector<double> window;
    if (mode == "hard-edge") {
        const HardEdgeConstants h = hard_edge(base, N, n - N);
        sc.mode = SimulationMode::hard_edge;
        sc.scale = static_cast<double>(N) * N * h.sigma_N;
    } else if (mode == "cusp") {
        window = parse_list(c.get<std::string>("window"), 2, "window");
        if (!(window[0] <= window[1])) {
            throw InvalidArgument("window: need s <= t");
        }
        const CriticalPointScan scan = find_critical_points(base);
        const CriticalPoint* cusp = nullptr;
        for (const CriticalPoint& p : scan.points) {
            if (p.kind == CriticalKind::cusp_candidate) {
                cusp = &p;
            }
        }
        if (!cusp) {
            throw InvalidArgument("simulate --mode cusp: the spectrum has no cusp");
        }
        const FiniteNCuspSequence seq = finite_n_cusp(spec, cusp->m);
        sc.mode = SimulationMode::cusp;
        sc.scale = std::pow(static_cast<double>(N), 0.75) * seq.sigma_N;
        sc.center = seq.a_N;
        sc.window = std::max({std::abs(window[0]), std::abs(window[1]), 1.0});
        summary["a_N"] = seq.a_N;
        summary["sigma_N"] = seq.sigma_N;
        summary["kappa_N"] = seq.kappa_N;
    } else {
        sc.mode = SimulationMode::global;
    }
    const SimulationRun run = simulate(sc);
    if (mode == "hard-edge") {
        const int alpha = n - N;
        const HardEdgeConstants h = hard_edge(base, N, alpha);
        c.csv_header("replica,x_min_scaled");
        for (std::size_t r = 0; r < run.smallest.size(); ++r) {
            *c.out << r << "," << run.smallest[r] << "\n";
        }
        json surv = json::array();
        for (const SurvivalPoint& p : empirical_smallest_cdf(run, parse_grid(c.get<std::string>("s"), "s"))) {
            json row = {{"s", p.s}, {"survival", p.survival}, {"stderr", p.std_error}};
            if (p.s > 0.0) {
                const HardEdgePrediction t = hard_edge_terms(alpha, p.s, N, h.sigma_N, h.zeta_N);
                row["F_alpha"] = t.F;
                row["prediction"] = t.prediction;
            }
            surv.push_back(row);
        }
        summary["scale"] = sc.scale;
        summary["survival"] = surv;
    } else if (mode == "cusp") {
        c.csv_header("replica,x_rescaled");
        for (std::size_t r = 0; r < run.rescaled.size(); ++r) {
            for (double u : run.rescaled[r]) {
                *c.out << r << "," << u << "\n";
            }
        }
        const CountStatistics cs = empirical_cusp_counts(run, window[0], window[1]);
        summary["window"] = window;
        summary["count_mean"] = cs.mean;
        summary["count_stderr"] = cs.std_error;
        summary["count_variance"] = cs.variance;
    } else {
        c.csv_header("x");
        std::vector<double> nonzero;
        for (double x : run.eigenvalues) {
            *c.out << x << "\n";
            if (x >= 1e-10) {
                nonzero.push_back(x);
            }
        }
        const PopulationSpectrum limit = base.with_finite_n(std::nullopt);
        const SupportDescription s = support(limit);
        const double hi = 1.05 * s.intervals.back().right;
        const DensityCurve curve = density_grid(limit, hi * 1e-6, hi, 8001);
        std::vector<double> cdf(curve.grid.size(), 0.0);
        for (std::size_t i = 1; i < cdf.size(); ++i) {
            cdf[i] = cdf[i - 1] + 0.5 * (curve.values[i] + curve.values[i - 1]) * (curve.grid[i] - curve.grid[i - 1]);
        }
        for (double& v : cdf) {
            v /= cdf.back();
        }
        summary["ks_distance"] = nonzero.empty() ? json(nullptr) : json(ks_distance(nonzero, curve.grid, cdf));
        summary["eigenvalues"] = run.eigenvalues.size();
    }
    int zeros_min = run.zero_counts.front();
    int zeros_max = zeros_min;
    for (int z : run.zero_counts) {
        zeros_min = std::min(zeros_min, z);
        zeros_max = std::max(zeros_max, z);
    }
    summary["zero_count_range"] = {zeros_min, zeros_max};
    summary["provenance"] = c.provenance();
    std::cerr << summary.dump(2) << "\n";
    return 0;
}

int cmd_validate(Context& c)
{
    bool ok = true;
    for (const CheckResult& r : run_validation(c.get<bool>("quick"))) {
        *c.out << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
        ok = ok && r.pass;
    }
    return ok ? 0 : 1;
}

std::string output_path(const std::string& path)
{
    if (path.empty()) {
        return path;
    }
    const char* dir = std::getenv("RMT_OUTPUT_DIR");
    std::filesystem::path p(path);
    if (dir && *dir && p.is_relative()) {
        p = std::filesystem::path(dir) / p;
    }
    return p.string();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spectral edges, cusps and gap probabilities of complex correlated Wishart matrices"};
    app.require_subcommand(1);
    std::string config_path;
    bool show_config = false;
    unsigned threads = 0;
    app.add_option("--config", config_path, "JSON run configuration; command-line flags override it");
    app.add_flag("--show-config", show_config, "Print the effective configuration and exit");
    app.add_option("--threads", threads, "Worker thread cap (0 = hardware; env RMT_THREADS)");

    // string-typed storage for every flag; types are checked when merged into the configuration
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
    std::map<std::string, CLI::App*> subs;
    auto add = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
        sub->add_option(name, values[sub->get_name() + "/" + key], help);
    };
    auto add_flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
        sub->add_flag(name, flags[sub->get_name() + "/" + key], help);
    };
    for (const std::string& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->fallthrough();
        subs[name] = sub;
        add(sub, "--spec", "spec_path", "Population spectrum JSON file");
        add(sub, "--output,-o", "output_path", "Output file (default stdout; relative to RMT_OUTPUT_DIR)");
    }
    subs["density"]->description("Limiting spectral density as CSV x,rho");
    add(subs["density"], "--range", "range", "a:b or auto");
    add(subs["density"], "--points", "points", "Grid points");
    add_flag(subs["density"], "--finite-n", "finite_n", "Use n/N and the finite_n weights");
    subs["support"]->description("Support intervals as JSON");
    add(subs["support"], "--points-per-interval", "points_per_interval", "Scan resolution per component of D");
    add_flag(subs["support"], "--finite-n", "finite_n", "Use n/N and the finite_n weights");
    subs["cusp-scan"]->description("Critical points, cusps and edges as JSON, or a finite-N cusp kernel grid");
    add(subs["cusp-scan"], "--points-per-interval", "points_per_interval", "Scan resolution per component of D");
    add_flag(subs["cusp-scan"], "--finite-n", "finite_n", "Use n/N and the finite_n weights");
    add(subs["cusp-scan"], "--kernel-N", "kernel_N", "Tune an exact cusp at this N and dump the scaled kernel");
    add(subs["cusp-scan"], "--tune-atom", "tune_atom", "Atom whose location is tuned (-1 = last)");
    add(subs["cusp-scan"], "--grid", "grid", "Kernel grid a:b:count");
    add(subs["cusp-scan"], "--contour-strategy", "contour_strategy", "saddle or circles");
    add(subs["cusp-scan"], "--panel-nodes", "panel_nodes", "Gauss-Legendre nodes per traced segment");
    add(subs["cusp-scan"], "--local-nodes", "local_nodes", "Nodes on the local arcs and segment");
    add(subs["cusp-scan"], "--cutoff", "cutoff", "Truncate contours where the integrand is below e^-cutoff");
    subs["pearcey"]->description("Pearcey kernel grid as CSV x,y,K, or a gap probability");
    add(subs["pearcey"], "--tau", "tau", "Pearcey parameter");
    add(subs["pearcey"], "--grid", "grid", "Kernel grid a:b:count");
    add(subs["pearcey"], "--representation", "representation", "functions or contour");
    add_flag(subs["pearcey"], "--gap", "gap", "Emit det(I - K) on the interval");
    add(subs["pearcey"], "--interval", "interval", "Gap interval s:t");
    add(subs["pearcey"], "--order", "order", "Initial Nystrom order");
    add(subs["pearcey"], "--truncation", "truncation", "Contour truncation T");
    add(subs["pearcey"], "--nodes", "nodes", "Quadrature nodes per ray");
    subs["hard-edge"]->description("Hard-edge constants, the 1/N expansion table or a finite-N kernel grid");
    add(subs["hard-edge"], "--alpha", "alpha", "n - N");
    add(subs["hard-edge"], "--N", "N", "Matrix size N");
    add(subs["hard-edge"], "--s", "s", "Gap sizes a:b:count");
    add_flag(subs["hard-edge"], "--expansion", "expansion", "Emit F_alpha, the correction and the finite-N determinant");
    add_flag(subs["hard-edge"], "--kernel", "kernel", "Emit the scaled finite-N kernel on --grid");
    add(subs["hard-edge"], "--grid", "grid", "Kernel grid a:b:count");
    add(subs["hard-edge"], "--order", "order", "Initial Nystrom order");
    subs["simulate"]->description("Monte Carlo samples as CSV with a JSON summary on stderr");
    add(subs["simulate"], "--mode", "mode", "hard-edge, cusp or global");
    add(subs["simulate"], "--N", "N", "Matrix size N");
    add(subs["simulate"], "--n", "n", "Population size n (0 = from the spectrum)");
    add(subs["simulate"], "--reps", "reps", "Replicas");
    add(subs["simulate"], "--seed", "seed", "Seed");
    add(subs["simulate"], "--s", "s", "Survival grid a:b:count (hard-edge mode)");
    add(subs["simulate"], "--window", "window", "Count window s:t (cusp mode)");
    subs["validate"]->description("Run the invariant suite; exit 1 on any failure");
    add_flag(subs["validate"], "--quick", "quick", "Coarser grids and fewer parameter points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        json cfg = defaults_for(command);
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                throw InvalidArgument("cannot read config file " + config_path);
            }
            json file;
            try {
                in >> file;
            } catch (const json::exception& e) {
                throw InvalidArgument(std::string("config file: ") + e.what());
            }
            if (file.contains("command") && file["command"] != command) {
                throw InvalidArgument("config file is for command " + file["command"].dump());
            }
            merge_config(cfg, file, "config file");
        }
        json given = json::object();
        CLI::App* sub = subs[command];
        for (const auto& [key, value] : values) {
            const std::string prefix = command + "/";
            if (key.rfind(prefix, 0) != 0) {
                continue;
            }
            const std::string name = key.substr(prefix.size());
            const json& current = cfg[name];
            std::string flag = "--" + name;
            std::replace(flag.begin(), flag.end(), '_', '-');
            if (name == "spec_path") {
                flag = "--spec";
            } else if (name == "output_path") {
                flag = "--output";
            }
            if (sub->get_option(flag)->count() == 0) {
                continue;
            }
            if (current.is_string()) {
                given[name] = value;
            } else {
                try {
                    given[name] = json::parse(value);
                } catch (const json::exception&) {
                    throw InvalidArgument(flag + ": not a number: " + value);
                }
            }
        }
        for (const auto& [key, value] : flags) {
            const std::string prefix = command + "/";
            if (key.rfind(prefix, 0) == 0 && value) {
                given[key.substr(prefix.size())] = true;
            }
        }
        merge_config(cfg, given, "command line");

        if (threads == 0) {
            if (const char* env = std::getenv("RMT_THREADS")) {
                try {
                    threads = static_cast<unsigned>(std::stoul(env));
                } catch (const std::exception&) {
                    throw InvalidArgument("RMT_THREADS must be a nonnegative integer");
                }
            }
        }
        set_thread_limit(threads);

        Context ctx;
        ctx.cfg = cfg;
        if (show_config) {
            std::cout << cfg.dump(2) << "\n";
            return 0;
        }
        if (!cfg["spec_path"].get<std::string>().empty()) {
            ctx.spec = load_spectrum(cfg["spec_path"].get<std::string>());
        }
        const std::string out = output_path(cfg["output_path"].get<std::string>());
        if (!out.empty()) {
            ctx.file.open(out);
            if (!ctx.file) {
                throw InvalidArgument("cannot write " + out);
            }
            ctx.out = &ctx.file;
        }
        *ctx.out << std::setprecision(17);

        if (command == "density") {
            return cmd_density(ctx);
        }
        if (command == "support") {
            return cmd_support(ctx);
        }
        if (command == "cusp-scan") {
            return cmd_cusp_scan(ctx);
        }
        if (command == "pearcey") {
            return cmd_pearcey(ctx);
        }
        if (command == "hard-edge") {
            return cmd_hard_edge(ctx);
        }
        if (command == "simulate") {
            return cmd_simulate(ctx);
        }
        return cmd_validate(ctx);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
