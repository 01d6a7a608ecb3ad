#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vmlab/geodesic.hpp"
#include "vmlab/profile.hpp"

namespace vmlab {

struct SuiteInfo {
  std::string name;
  std::string statement;      // the result the suite exercises
  std::string default_model;  // "all" when it loops over several models
};

const std::vector<SuiteInfo>& suite_list();

struct SuiteOptions {
  std::optional<ProfileModel> model;       // replaces the default model(s)
  std::optional<ProfileModel> comparison;  // gtct only
  std::optional<double> horizon;
  std::uint64_t seed = 1;
  DistanceOptions distance;
  std::filesystem::path out_dir;  // empty: no artifacts
  unsigned threads = 0;
};

struct SuiteVerdict {
  std::string suite;
  std::vector<std::string> models;
  bool passed = false;  // failures == 0
  std::size_t trials = 0;
  std::size_t skips = 0;
  std::size_t failures = 0;
  std::vector<std::string> artifacts;
  std::vector<std::string> messages;  // one per failure
  nlohmann::json metrics = nlohmann::json::object();
};

// Throws PreconditionError for an unknown suite name.
SuiteVerdict run_suite(std::string_view name, const SuiteOptions& opts = {});

nlohmann::json to_json(const SuiteVerdict& v);

}  // namespace vmlab
