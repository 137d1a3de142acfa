#pragma once

#include <json.hpp>

#include <string>

#include "prv/estimators.hpp"
#include "prv/experiments.hpp"
#include "prv/simulator.hpp"
#include "prv/tuning.hpp"

namespace prv {

using Json = nlohmann::json;

/// Serializes with every floating-point value printed to 17 significant
/// digits, so reports are byte-stable across runs. Non-finite values become null.
std::string dump_report(const Json& doc, int indent = 2);

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const SymmetricMatrix& m);
Json to_json(const PrvEstimate& est);
Json to_json(const SpotEstimate& est);
Json to_json(const QuantileSummary& q);
Json to_json(const McReport& report);

/// Ground truth written next to a simulated panel.
Json truth_sidecar(const SimOutput& sim);

}  // namespace prv
