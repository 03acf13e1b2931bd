#pragma once

#include <json.hpp>
#include <string>

#include "parisi/energy.hpp"
#include "parisi/measure.hpp"
#include "parisi/oracle.hpp"
#include "parisi/phases.hpp"

namespace parisi {

using Json = nlohmann::ordered_json;

// {segments:[{lo,hi,kind,value?}], atom}; value is present for constant segments.
Json to_json(const ParisiMeasure& nu);
Json to_json(const VerificationReport& r);
Json to_json(const Classification& c);
Json to_json(const PhaseBoundaries& b);
Json to_json(const OracleProfile& prof);

// Accepts a bare measure or any object carrying one under "measure".
// Throws InvalidMeasure on malformed input.
ParisiMeasure measure_from_json(const Json& j);
ParisiMeasure parse_measure(const std::string& text);

}  // namespace parisi
