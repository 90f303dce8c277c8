#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ioprobe/conic.hpp"
#include "ioprobe/gain.hpp"
#include "ioprobe/lti.hpp"
#include "ioprobe/passivity.hpp"
#include "ioprobe/probe.hpp"

namespace ioprobe::cli {

/// Line-oriented `key = value` text with `[section]` headers. `#` and `;`
/// start comment lines. Keys are unique per section.
struct IniEntry {
  std::string value;
  std::size_t line = 0;
};

struct IniFile {
  std::string origin;
  std::map<std::string, std::map<std::string, IniEntry>> sections;

  bool has(const std::string& section) const { return sections.count(section) != 0; }
};

IniFile parse_ini(std::istream& in, const std::string& origin);
IniFile load_ini(const std::filesystem::path& path);

enum class Property { gain, passivity, cone, all };

struct PlantInfo {
  Plant plant;
  /// Resolved plant keys in a fixed order, for meta output.
  std::vector<std::pair<std::string, std::string>> resolved;
};

/// Builds the plant from a [plant] section; `file =` loads another file's
/// [plant] section relative to `base_dir`.
PlantInfo build_plant(const IniFile& ini, const std::filesystem::path& base_dir);

struct ExperimentConfig {
  std::filesystem::path path;
  PlantInfo plant;
  NoiseModel noise;
  Property property = Property::all;
  GainConfig gain;
  PassivityConfig passivity;
  ConeConfig cone;
  std::optional<std::size_t> budget;
  bool validate = true;
  std::optional<std::string> out;

  // [compare]
  Property compare_property = Property::gain;
  std::vector<std::string> compare_methods;
  std::vector<std::size_t> compare_budgets;
};

/// Parses and validates the whole file; every problem is a ConfigError.
ExperimentConfig load_experiment(const std::filesystem::path& path);
ExperimentConfig parse_experiment(const IniFile& ini, const std::filesystem::path& base_dir);

/// Replaces the noise seed and the white-noise start seed.
void apply_seed(ExperimentConfig& cfg, std::uint64_t seed);

/// Fully resolved settings as ordered key=value lines.
std::vector<std::pair<std::string, std::string>> resolved_settings(const ExperimentConfig& cfg);

std::string to_string(Property p);
std::string to_string(GainMethod m);
std::string to_string(PassivityMethod m);
std::string to_string(ConeMethod m);
std::optional<GainMethod> parse_gain_method(const std::string& s);
std::optional<PassivityMethod> parse_passivity_method(const std::string& s);
std::optional<ConeMethod> parse_cone_method(const std::string& s);

}  // namespace ioprobe::cli
