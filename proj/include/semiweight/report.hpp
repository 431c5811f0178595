#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "semiweight/measure_semigroup.hpp"
#include "semiweight/weights.hpp"

namespace semiweight {

using Json = nlohmann::ordered_json;

// {"mu": [...], "A": [[...]], "kind": "markovian"|"submarkovian"}
Generator generator_from_json(const Json& j);
Generator load_generator(const std::string& path);

Weight weight_from_json(const Json& j);  // plain array
Weight load_weight(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string format_double(double v);  // shortest round-trip-stable decimal

std::string matrix_to_csv(const Mat& m);

// FNV-1a over a canonical text rendering; used to tag report provenance.
uint64_t content_hash(const std::string& text);

}  // namespace semiweight
