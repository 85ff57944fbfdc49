// json_io.hpp - JSON documents for rate parameters, pulse sequences and fit
// results. All readers reject unknown keys.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nvcycle/fit.hpp"
#include "nvcycle/rate_parameters.hpp"
#include "nvcycle/sequence.hpp"

namespace nvcycle {

// Throws ValidationError when obj carries a key outside allowed.
void require_known_keys(const nlohmann::json& obj,
                        const std::vector<std::string>& allowed,
                        const std::string& context);

nlohmann::json rate_parameters_to_json(const RateParameters& params);
RateParameters rate_parameters_from_json(const nlohmann::json& doc);

// Ordered array of tagged segment objects.
nlohmann::json segments_to_json(const std::vector<Segment>& segments);
std::vector<Segment> segments_from_json(const nlohmann::json& doc);

nlohmann::json fit_result_to_json(const FitResult& result);
FitResult fit_result_from_json(const nlohmann::json& doc);

}  // namespace nvcycle
