#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "fracdim/energy_min.hpp"
#include "fracdim/process_models.hpp"
#include "fracdim/profiles.hpp"
#include "fracdim/set_models.hpp"
#include "fracdim/simulate.hpp"

namespace fracdim {

using Json = nlohmann::json;

struct LadderSpec {
  double start = 0.0;
  double ratio = 0.0;
  int count = 0;
  std::vector<double> values() const { return geometric_ladder(start, ratio, count); }
  bool operator==(const LadderSpec&) const = default;
};

LadderSpec parse_ladder(const std::string& text);  // "start,ratio,count"

// Flat experiment record; every CLI flag has a field of the same name.
struct RunConfig {
  std::string command;
  std::optional<Json> set;  // descriptor string or {kind, params, depth}
  std::optional<std::string> family;
  std::optional<double> s;
  std::optional<std::string> model;  // isotropic_stable | subordinator | subordinate_brownian
  std::optional<double> alpha;
  std::optional<double> c;
  std::optional<int> d;
  std::optional<Json> phi;  // descriptor string or {family, params}
  std::optional<LadderSpec> ladder;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<double> mesh_factor;
  std::optional<std::string> mode;
  std::optional<int> restarts;
  std::optional<double> lambda_max;
  std::optional<double> band;
  std::optional<double> eps;
  std::optional<double> t;
  std::optional<std::uint64_t> samples;
  std::optional<std::string> suite;
  std::optional<std::string> out;
  std::optional<std::string> csv;

  bool operator==(const RunConfig&) const = default;
};

RunConfig config_from_json(const Json& j);
Json config_to_json(const RunConfig& c);
// Fields set in `overrides` replace those in `base`.
RunConfig merge(RunConfig base, const RunConfig& overrides);
// Command-specific checks; messages start with the offending field.
void validate(const RunConfig& c);

// Descriptors. Strings: "stable:0.5", "gamma:a,b", "cpd:rate,mean,drift"; sets "cantor3",
// "interval:a,b", "points:x,y,...", "ifs:r1,r2;t1,t2". Objects {family, params} and
// {kind, params, depth} are accepted too.
LaplaceExponent parse_phi(const Json& j);
CompactSet parse_set(const Json& j);
// {kind, alpha, scale, d, phi}
LevyModel parse_model(const Json& j);
LevyModel model_from_config(const RunConfig& c);
CompactSet set_from_config(const RunConfig& c);
KernelFamily family_from_config(const RunConfig& c);

Json to_json(const LadderEstimate& e);
Json to_json(const EnergyResult& r, double scale);
Json to_json(const ProfileReport& r);
Json to_json(const ImageExperiment& e);
Json to_json(const ThetaReport& r);
Json to_json(const Comparison& c);

// Rows {set, family, s_or_phi, scale, Z_or_value}.
void write_profile_csv(std::ostream& out, const ProfileReport& r);

// RFC 4180 field quoting.
std::string csv_field(const std::string& text);

}  // namespace fracdim
