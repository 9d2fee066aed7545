#pragma once

#include "json.hpp"

#include "emden/classifier.hpp"
#include "emden/energy.hpp"
#include "emden/params.hpp"
#include "emden/shooting.hpp"

namespace emden {

using json = nlohmann::ordered_json;

void to_json(json& j, const ProblemParams& p);
void from_json(const json& j, ProblemParams& p);
void to_json(json& j, const DerivedConstants& dc);
void to_json(json& j, const RegimeFlags& flags);
void to_json(json& j, const Window& w);
void to_json(json& j, const OscillationEnvelope& env);
void to_json(json& j, const ClassificationReport& report);
void to_json(json& j, const ShotResult& shot);
void to_json(json& j, const Bisection& b);
void to_json(json& j, const ThresholdScan& scan);
void to_json(json& j, const ConnectingOrbit& orbit);
void to_json(json& j, const DifferenceProbe& probe);
void to_json(json& j, const BoundReport& report);

/// Output of `emden exponents`: parameters, derived constants and regime flags.
[[nodiscard]] json exponents_json(const ProblemParams& params, double eps_crit = kDefaultEpsCrit);

}  // namespace emden
