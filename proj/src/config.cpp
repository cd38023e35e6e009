#include "fracdim/config.hpp"

#include <charconv>
#include <cmath>
#include <locale>
#include <ostream>
#include <sstream>

#include "fracdim/errors.hpp"

namespace fracdim {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& message) {
  throw InvalidArgument(field + ": " + message);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& text, const std::string& field) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) bad(field, "not a number: '" + text + "'");
  return v;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& field) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(parse_double(part, field));
  return out;
}

std::vector<double> json_doubles(const Json& j, const std::string& field) {
  if (j.is_string()) return parse_doubles(j.get<std::string>(), field);
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) bad(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) bad(field, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void need_count(const std::vector<double>& p, std::size_t n, const std::string& field) {
  if (p.size() != n) bad(field, "expected " + std::to_string(n) + " parameters, got " + std::to_string(p.size()));
}

LaplaceExponent phi_from(const std::string& family, const Json& params) {
  const std::string field = "phi.params";
  if (family == "tabulated") {
    if (!params.is_array()) bad(field, "tabulated exponent needs [[lambda, phi], ...]");
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : params) {
      if (!k.is_array() || k.size() != 2) bad(field, "each knot is a [lambda, phi] pair");
      knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    return LaplaceExponent::tabulated(std::move(knots));
  }
  const auto p = json_doubles(params, field);
  if (family == "stable") {
    need_count(p, 1, field);
    return LaplaceExponent::stable(p[0]);
  }
  if (family == "gamma") {
    need_count(p, 2, field);
    return LaplaceExponent::gamma(p[0], p[1]);
  }
  if (family == "cpd" || family == "compound_poisson_drift") {
    need_count(p, 3, field);
    return LaplaceExponent::compound_poisson_drift(p[0], p[1], p[2]);
  }
  bad("phi.family", "unknown family '" + family + "'");
}

CompactSet set_from(const std::string& kind, const Json& params, int depth) {
  const std::string field = "set.params";
  if (kind == "cantor3") return CompactSet::middle_third_cantor(depth);
  if (kind == "interval") {
    const auto p = json_doubles(params, field);
    need_count(p, 2, field);
    return CompactSet::interval(p[0], p[1]);
  }
  if (kind == "points") return CompactSet::points(json_doubles(params, field));
  if (kind == "ifs") {
    std::vector<double> ratios, shifts;
    if (params.is_string()) {
      for (const auto& map : split(params.get<std::string>(), ';')) {
        const auto p = parse_doubles(map, field);
        need_count(p, 2, field);
        ratios.push_back(p[0]);
        shifts.push_back(p[1]);
      }
    } else if (params.is_array()) {
      for (const auto& map : params) {
        const auto p = json_doubles(map, field);
        need_count(p, 2, field);
        ratios.push_back(p[0]);
        shifts.push_back(p[1]);
      }
    } else {
      bad(field, "ifs needs [[ratio, shift], ...] or 'r,t;r,t'");
    }
    return CompactSet::ifs(std::move(ratios), std::move(shifts), depth);
  }
  if (kind == "union") {
    if (!params.is_array() || params.empty()) bad(field, "union needs a nonempty array of set descriptors");
    std::vector<CompactSet> parts;
    for (const auto& part : params) parts.push_back(parse_set(part));
    return CompactSet::union_of(std::move(parts));
  }
  bad("set.kind", "unknown kind '" + kind + "'");
}

template <class T>
void put(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get(const Json& j, const char* key, std::optional<T>& v) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    v = j.at(key).get<T>();
  } catch (const Json::exception&) {
    bad(key, "wrong type");
  }
}

template <class T>
void over(std::optional<T>& base, const std::optional<T>& o) {
  if (o) base = o;
}

bool is_lambda_family(const RunConfig& c) {
  return c.command == "subordinator" || (c.command == "profile" && c.family && *c.family == "subordinator");
}

}  // namespace

LadderSpec parse_ladder(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) bad("ladder", "expected start,ratio,count");
  LadderSpec l;
  l.start = parse_double(parts[0], "ladder.start");
  l.ratio = parse_double(parts[1], "ladder.ratio");
  const double count = parse_double(parts[2], "ladder.count");
  if (count != std::floor(count) || count < 0 || count > 1e6) bad("ladder.count", "must be a nonnegative integer");
  l.count = static_cast<int>(count);
  return l;
}

LaplaceExponent parse_phi(const Json& j) {
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    const auto colon = text.find(':');
    if (colon == std::string::npos) bad("phi", "expected family:params, got '" + text + "'");
    return phi_from(trim(text.substr(0, colon)), Json(text.substr(colon + 1)));
  }
  if (!j.is_object() || !j.contains("family")) bad("phi", "expected a string or {family, params}");
  return phi_from(j.at("family").get<std::string>(), j.value("params", Json::array()));
}

CompactSet parse_set(const Json& j) {
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    const auto colon = text.find(':');
    const std::string kind = trim(text.substr(0, colon));
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "cantor3") {
      int depth = 30;
      if (!trim(rest).empty()) depth = static_cast<int>(parse_double(rest, "set.depth"));
      return CompactSet::middle_third_cantor(depth);
    }
    if (colon == std::string::npos) bad("set", "expected kind:params, got '" + text + "'");
    return set_from(kind, Json(rest), 30);
  }
  if (!j.is_object() || !j.contains("kind")) bad("set", "expected a string or {kind, params, depth}");
  const int depth = j.value("depth", 30);
  return set_from(j.at("kind").get<std::string>(), j.value("params", Json::array()), depth);
}

LevyModel parse_model(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) bad("model", "expected {kind, alpha, scale, d, phi}");
  const auto kind = j.at("kind").get<std::string>();
  const int d = j.value("d", 1);
  if (kind == "isotropic_stable" || kind == "stable") {
    if (!j.contains("alpha")) bad("model.alpha", "required for isotropic_stable");
    return LevyModel::stable(j.at("alpha").get<double>(), j.value("scale", 1.0), d);
  }
  if (!j.contains("phi")) bad("model.phi", "required for " + kind);
  if (kind == "subordinator") return LevyModel::subordinator(parse_phi(j.at("phi")));
  if (kind == "subordinate_brownian") return LevyModel::subordinate_brownian(parse_phi(j.at("phi")), d);
  bad("model.kind", "unknown kind '" + kind + "'");
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) bad("config", "expected a JSON object");
  static const char* known[] = {"command", "set",     "family", "s",          "model",   "alpha",
                                "c",       "d",       "phi",    "ladder",     "tol",     "seed",
                                "paths",   "mesh_factor", "mode", "restarts", "lambda_max", "band",
                                "eps",     "t",       "samples", "suite",     "out",     "csv"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) bad(key, "unknown field");
  }
  RunConfig c;
  if (j.contains("command")) c.command = j.at("command").get<std::string>();
  if (j.contains("set") && !j.at("set").is_null()) c.set = j.at("set");
  if (j.contains("phi") && !j.at("phi").is_null()) c.phi = j.at("phi");
  get(j, "family", c.family);
  get(j, "s", c.s);
  // a model object is flattened into the individual fields
  if (j.contains("model") && j.at("model").is_object()) {
    const auto& m = j.at("model");
    if (m.contains("kind")) c.model = m.at("kind").get<std::string>();
    get(m, "alpha", c.alpha);
    get(m, "scale", c.c);
    get(m, "d", c.d);
    if (m.contains("phi")) c.phi = m.at("phi");
  } else {
    get(j, "model", c.model);
  }
  get(j, "alpha", c.alpha);
  get(j, "c", c.c);
  get(j, "d", c.d);
  if (j.contains("ladder") && !j.at("ladder").is_null()) {
    const auto& l = j.at("ladder");
    if (l.is_string()) {
      c.ladder = parse_ladder(l.get<std::string>());
    } else if (l.is_object()) {
      LadderSpec s;
      try {
        s.start = l.at("start").get<double>();
        s.ratio = l.at("ratio").get<double>();
        s.count = l.at("count").get<int>();
      } catch (const Json::exception&) {
        bad("ladder", "expected {start, ratio, count}");
      }
      c.ladder = s;
    } else {
      bad("ladder", "expected {start, ratio, count} or 'start,ratio,count'");
    }
  }
  get(j, "tol", c.tol);
  get(j, "seed", c.seed);
  get(j, "paths", c.paths);
  get(j, "mesh_factor", c.mesh_factor);
  get(j, "mode", c.mode);
  get(j, "restarts", c.restarts);
  get(j, "lambda_max", c.lambda_max);
  get(j, "band", c.band);
  get(j, "eps", c.eps);
  get(j, "t", c.t);
  get(j, "samples", c.samples);
  get(j, "suite", c.suite);
  get(j, "out", c.out);
  get(j, "csv", c.csv);
  return c;
}

Json config_to_json(const RunConfig& c) {
  Json j = Json::object();
  j["command"] = c.command;
  put(j, "set", c.set);
  put(j, "family", c.family);
  put(j, "s", c.s);
  put(j, "model", c.model);
  put(j, "alpha", c.alpha);
  put(j, "c", c.c);
  put(j, "d", c.d);
  put(j, "phi", c.phi);
  if (c.ladder) j["ladder"] = {{"start", c.ladder->start}, {"ratio", c.ladder->ratio}, {"count", c.ladder->count}};
  put(j, "tol", c.tol);
  put(j, "seed", c.seed);
  put(j, "paths", c.paths);
  put(j, "mesh_factor", c.mesh_factor);
  put(j, "mode", c.mode);
  put(j, "restarts", c.restarts);
  put(j, "lambda_max", c.lambda_max);
  put(j, "band", c.band);
  put(j, "eps", c.eps);
  put(j, "t", c.t);
  put(j, "samples", c.samples);
  put(j, "suite", c.suite);
  put(j, "out", c.out);
  put(j, "csv", c.csv);
  return j;
}

RunConfig merge(RunConfig base, const RunConfig& o) {
  if (!o.command.empty()) base.command = o.command;
  over(base.set, o.set);
  over(base.family, o.family);
  over(base.s, o.s);
  over(base.model, o.model);
  over(base.alpha, o.alpha);
  over(base.c, o.c);
  over(base.d, o.d);
  over(base.phi, o.phi);
  over(base.ladder, o.ladder);
  over(base.tol, o.tol);
  over(base.seed, o.seed);
  over(base.paths, o.paths);
  over(base.mesh_factor, o.mesh_factor);
  over(base.mode, o.mode);
  over(base.restarts, o.restarts);
  over(base.lambda_max, o.lambda_max);
  over(base.band, o.band);
  over(base.eps, o.eps);
  over(base.t, o.t);
  over(base.samples, o.samples);
  over(base.suite, o.suite);
  over(base.out, o.out);
  over(base.csv, o.csv);
  return base;
}

void validate(const RunConfig& c) {
  static const char* commands[] = {"profile", "subordinator", "theta", "simulate", "verify", "oracle"};
  bool known = false;
  for (const char* k : commands) known = known || c.command == k;
  if (!known) bad("command", "unknown command '" + c.command + "'");

  if (c.ladder) {
    if (c.ladder->count < 3) bad("ladder.count", "must be at least 3");
    if (!(c.ladder->start > 0.0)) bad("ladder.start", "must be positive");
    if (is_lambda_family(c)) {
      if (!(c.ladder->ratio > 1.0)) bad("ladder.ratio", "must exceed 1 for a lambda ladder");
    } else if (!(c.ladder->ratio > 0.0 && c.ladder->ratio < 1.0)) {
      bad("ladder.ratio", "must lie in (0, 1) for a radius ladder");
    }
  }
  if ((c.command == "simulate" || c.command == "oracle") && !c.seed) bad("seed", "required for " + c.command);
  if (c.tol && !(*c.tol > 0.0)) bad("tol", "must be positive");
  if (c.paths && *c.paths < 1) bad("paths", "must be at least 1");
  if (c.mesh_factor && !(*c.mesh_factor > 0.0)) bad("mesh_factor", "must be positive");
  if (c.restarts && *c.restarts < 0) bad("restarts", "must be nonnegative");
  if (c.d && *c.d < 1) bad("d", "must be at least 1");
  if (c.band && !(*c.band > 0.0)) bad("band", "must be positive");
  if (c.mode) slope_mode_from_string(*c.mode);
  if (c.suite && *c.suite != "fast" && *c.suite != "full") bad("suite", "expected fast or full");

  if (c.command == "profile") {
    if (!c.set) bad("set", "required for profile");
    if (!c.family) bad("family", "required for profile");
    if (!c.ladder) bad("ladder", "required for profile");
  } else if (c.command == "subordinator") {
    if (!c.phi) bad("phi", "required for subordinator");
    if (!c.ladder) bad("ladder", "required for subordinator");
  } else if (c.command == "theta") {
    if (!c.phi) bad("phi", "required for theta");
    if (!c.s) bad("s", "required for theta");
  } else if (c.command == "simulate") {
    if (!c.ladder) bad("ladder", "required for simulate");
  } else if (c.command == "oracle") {
    if (!c.eps) bad("eps", "required for oracle");
  }
}

LevyModel model_from_config(const RunConfig& c) {
  Json m = Json::object();
  std::string kind = c.model.value_or("");
  if (kind.empty()) {
    if (c.alpha) kind = "isotropic_stable";
    else if (c.phi) kind = "subordinator";
    else bad("model", "give alpha for a stable model or phi for a subordinator");
  }
  m["kind"] = kind;
  if (c.alpha) m["alpha"] = *c.alpha;
  if (c.c) m["scale"] = *c.c;
  if (c.d) m["d"] = *c.d;
  if (c.phi) m["phi"] = *c.phi;
  return parse_model(m);
}

CompactSet set_from_config(const RunConfig& c) {
  if (!c.set) bad("set", "missing");
  return parse_set(*c.set);
}

KernelFamily family_from_config(const RunConfig& c) {
  const std::string f = c.family.value_or("");
  if (f == "fh") {
    if (!c.s) bad("s", "required for the fh family");
    if (!(*c.s > 0.0)) bad("s", "must be positive");
    return KernelFamily::falconer_howroyd(*c.s);
  }
  if (f == "sandwich") {
    if (!c.alpha) bad("alpha", "required for the sandwich family");
    return KernelFamily::stable_sandwich(*c.alpha, c.d.value_or(1));
  }
  if (f == "subordinator") {
    if (!c.phi) bad("phi", "required for the subordinator family");
    return KernelFamily::subordinator_exp(parse_phi(*c.phi));
  }
  if (f == "exact") return KernelFamily::exact(model_from_config(c));
  bad("family", "expected fh, sandwich, subordinator, exact or levy");
}

Json to_json(const LadderEstimate& e) {
  return {{"scales", e.scales},
          {"values", e.values},
          {"x", e.x},
          {"y", e.y},
          {"mode", to_string(e.mode)},
          {"slope", e.slope},
          {"intercept", e.intercept},
          {"max_residual", e.max_residual},
          {"least_squares", e.least_squares},
          {"upper", e.upper},
          {"lower", e.lower}};
}

Json to_json(const EnergyResult& r, double scale) {
  return {{"scale", scale},
          {"Z", r.value},
          {"gap", r.duality_gap},
          {"iters", r.iterations},
          {"flagged_nonconvex", r.flagged_nonconvex}};
}

Json to_json(const ProfileReport& r) {
  Json points = Json::array();
  for (const auto& p : r.points) {
    points.push_back({{"scale", p.scale},
                      {"mesh", p.mesh},
                      {"net_size", p.net_size},
                      {"Z", p.energy},
                      {"gap", p.gap},
                      {"iters", p.iterations},
                      {"flagged_nonconvex", p.flagged_nonconvex}});
  }
  Json j = {{"set", r.set_id},
            {"family", r.family},
            {"parameter", r.parameter},
            {"model", r.model},
            {"estimate", r.estimate},
            {"mode", to_string(r.mode)},
            {"ladder", to_json(r.ladder)},
            {"points", points},
            {"certified", r.certified},
            {"within_window", r.within_window}};
  j["packing_profile"] = r.packing_profile ? Json(*r.packing_profile) : Json(nullptr);
  return j;
}

Json to_json(const ImageExperiment& e) {
  return {{"model", e.model},
          {"set", e.set},
          {"n_paths", e.n_paths},
          {"r_ladder", e.r_ladder},
          {"seed", e.seed},
          {"mode", to_string(e.mode)},
          {"mesh", e.mesh},
          {"net_size", e.net_size},
          {"estimates", e.estimates},
          {"median", e.median},
          {"q1", e.q1},
          {"q3", e.q3},
          {"iqr", e.iqr()}};
}

Json to_json(const ThetaReport& r) { return {{"theta", r.theta}, {"ladder", to_json(r.ladder)}}; }

Json to_json(const Comparison& c) {
  return {{"theory", c.theory},
          {"empirical", c.empirical},
          {"difference", c.difference},
          {"band", c.band},
          {"pass", c.pass}};
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_profile_csv(std::ostream& out, const ProfileReport& r) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << "set,family,s_or_phi,scale,Z_or_value\r\n";
  for (const auto& p : r.points) {
    os << csv_field(r.set_id) << ',' << csv_field(r.family) << ',' << csv_field(r.parameter) << ',' << p.scale
       << ',' << p.energy << "\r\n";
  }
  out << os.str();
}

}  // namespace fracdim
