#include "rmt/spectrum_json.hpp"

#include <fstream>
#include <set>

#include "rmt/errors.hpp"

namespace rmt {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::set<std::string>& required,
                const std::string& where)
{
    if (!j.is_object()) {
        throw InvalidArgument(where + ": expected a JSON object");
    }
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw InvalidArgument(where + ": unknown key \"" + item.key() + "\"");
        }
    }
    for (const std::string& k : required) {
        if (!j.contains(k)) {
            throw InvalidArgument(where + ": missing key \"" + k + "\"");
        }
    }
}

double number(const nlohmann::json& j, const std::string& key)
{
    if (!j.at(key).is_number()) {
        throw InvalidArgument("spectrum: \"" + key + "\" must be a number");
    }
    return j.at(key).get<double>();
}

int integer(const nlohmann::json& j, const std::string& key)
{
    if (!j.at(key).is_number_integer()) {
        throw InvalidArgument("spectrum: \"" + key + "\" must be an integer");
    }
    return j.at(key).get<int>();
}

}  // namespace

PopulationSpectrum spectrum_from_json(const nlohmann::json& j)
{
    check_keys(j, {"gamma", "atoms", "finite_n"}, {"gamma", "atoms"}, "spectrum");
    if (!j.at("atoms").is_array()) {
        throw InvalidArgument("spectrum: \"atoms\" must be an array");
    }
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
        check_keys(a, {"lambda", "weight"}, {"lambda", "weight"}, "spectrum atom");
        atoms.push_back({number(a, "lambda"), number(a, "weight")});
    }
    std::optional<FiniteN> finite_n;
    if (j.contains("finite_n")) {
        const auto& f = j.at("finite_n");
        check_keys(f, {"N", "n"}, {"N", "n"}, "spectrum finite_n");
        finite_n = FiniteN{integer(f, "N"), integer(f, "n")};
    }
    return PopulationSpectrum(std::move(atoms), number(j, "gamma"), finite_n);
}

nlohmann::json spectrum_to_json(const PopulationSpectrum& spec)
{
    nlohmann::json j;
    j["gamma"] = spec.gamma();
    j["atoms"] = nlohmann::json::array();
    for (const Atom& a : spec.atoms()) {
        j["atoms"].push_back({{"lambda", a.lambda}, {"weight", a.weight}});
    }
    if (spec.finite_n()) {
        j["finite_n"] = {{"N", spec.finite_n()->N}, {"n", spec.finite_n()->n}};
    }
    return j;
}

PopulationSpectrum load_spectrum(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot read spectrum file " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("spectrum file " + path + ": " + e.what());
    }
    return spectrum_from_json(j);
}

}  // namespace rmt
