#pragma once

#include <string>

#include "json.hpp"
#include "rmt/spectral_model.hpp"

namespace rmt {

// {"gamma": g, "atoms": [{"lambda": l, "weight": w}, ...], "finite_n": {"N": N, "n": n}}; finite_n optional.
// Unknown keys and malformed values raise InvalidArgument.
PopulationSpectrum spectrum_from_json(const nlohmann::json& j);
nlohmann::json spectrum_to_json(const PopulationSpectrum& spec);
PopulationSpectrum load_spectrum(const std::string& path);

}  // namespace rmt
