#pragma once

#include <filesystem>

#include <json.hpp>

#include "fdcate/dgp.hpp"
#include "fdcate/harness.hpp"
#include "fdcate/learners.hpp"

namespace fdcate {

// JSON mappings. Reading is lenient about missing keys (defaults are kept)
// and strict about unknown enum names and out-of-range values.
void to_json(nlohmann::json& j, const GbtParams& p);
void from_json(const nlohmann::json& j, GbtParams& p);
void to_json(nlohmann::json& j, const LearnerConfig& c);
void from_json(const nlohmann::json& j, LearnerConfig& c);
void to_json(nlohmann::json& j, const DgpSpec& s);
void from_json(const nlohmann::json& j, DgpSpec& s);
void to_json(nlohmann::json& j, const ExperimentGrid& g);
void from_json(const nlohmann::json& j, ExperimentGrid& g);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace fdcate
