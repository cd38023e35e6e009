#include "fracdim/run.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fracdim/errors.hpp"
#include "fracdim/profiles.hpp"
#include "fracdim/simulate.hpp"
#include "fracdim/verify.hpp"

namespace fracdim {

namespace {

void write_file(const std::string& path, const std::string& text, const char* field) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument(std::string(field) + ": cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw InvalidArgument(std::string(field) + ": write to '" + path + "' failed");
}

// Pretty JSON with a trailing newline; keys come out sorted.
std::string render(const Json& j) { return j.dump(2) + "\n"; }

void emit(const RunConfig& c, const Json& report, std::ostream& out) {
  if (c.out) write_file(*c.out, render(report), "out");
  else out << render(report);
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

ProfileOptions profile_options(const RunConfig& c) {
  ProfileOptions o;
  if (c.mesh_factor) o.mesh_factor = *c.mesh_factor;
  if (c.mode) o.mode = slope_mode_from_string(*c.mode);
  if (c.tol) o.energy.tol = *c.tol;
  if (c.restarts) o.energy.restarts = *c.restarts;
  if (c.seed) o.energy.seed = *c.seed;
  if (c.d) o.dim = *c.d;
  return o;
}

int cmd_profile(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto set = set_from_config(c);
  const auto ladder = c.ladder->values();
  const auto opts = profile_options(c);
  ProfileReport rep = *c.family == "levy" ? levy_profile(model_from_config(c), set, ladder, opts)
                                          : box_profile(set, family_from_config(c), ladder, opts);
  emit(c, to_json(rep), out);
  if (c.csv) {
    std::ostringstream os;
    write_profile_csv(os, rep);
    write_file(*c.csv, os.str(), "csv");
  }
  if (c.out) err << "estimate " << fixed(rep.estimate) << "\n";
  return kExitOk;
}

int cmd_subordinator(const RunConfig& c, std::ostream& out, std::ostream& err) {
  RunConfig p = c;
  p.family = "subordinator";
  if (!p.set) p.set = "interval:0,1";
  return cmd_profile(p, out, err);
}

int cmd_theta(const RunConfig& c, std::ostream& out) {
  const auto phi = parse_phi(*c.phi);
  const double lmax = c.lambda_max.value_or(kDefaultThetaLambdaMax);
  const auto rep = theta_index_report(phi, *c.s, lmax, c.tol.value_or(1e-8));
  const double predicted = *c.s * (1.0 - rep.theta);
  Json j = to_json(rep);
  j["phi"] = phi.tag();
  j["s"] = *c.s;
  j["predicted"] = predicted;
  if (c.out) write_file(*c.out, render(j), "out");
  out << "theta " << fixed(rep.theta) << "\n" << "prediction " << fixed(predicted) << "\n";
  return kExitOk;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const auto model = model_from_config(c);
  const auto set = c.set ? set_from_config(c) : CompactSet::interval(0.0, 1.0);
  ExperimentOptions opts;
  if (c.mode) opts.mode = slope_mode_from_string(*c.mode);
  if (c.mesh_factor) opts.mesh_factor = *c.mesh_factor;
  const auto e = image_dim_experiment(model, set, static_cast<std::size_t>(c.paths.value_or(32)), c.ladder->values(),
                                      *c.seed, opts);
  emit(c, to_json(e), out);
  if (c.csv) {
    std::ostringstream os;
    write_experiment_csv(os, e);
    write_file(*c.csv, os.str(), "csv");
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto suite = suite_from_string(c.suite.value_or("full"));
  const auto seed = c.seed.value_or(kDefaultVerifySeed);
  const auto results = run_suite(suite, seed, [&](const CriterionResult& r) { err << summary_line(r) << "\n"; });
  const auto report = suite_report(suite, seed, results);
  if (c.out) {
    write_file(*c.out, render(report), "out");
    write_file(*c.out + ".timing.json", render(suite_timings(results)), "out");
  } else {
    out << render(report);
  }
  bool ok = true;
  for (const auto& r : results) ok = ok && r.ok();
  return ok ? kExitOk : kExitFailure;
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
  const auto model = model_from_config(c);
  const double eps = *c.eps, t = c.t.value_or(1.0);
  const auto mc = kappa_monte_carlo(model, eps, t, c.samples.value_or(1000000), *c.seed);
  Json j = {{"model", model.tag()}, {"eps", eps}, {"t", t}, {"monte_carlo", mc.estimate}, {"half_width", mc.half_width}};
  if (const auto* s = std::get_if<IsotropicStable>(&model.kind()); s && s->dim == 1) {
    const double q = kappa_stable_1d(s->alpha, s->scale, eps, t);
    j["quadrature"] = q;
    j["agree"] = std::abs(q - mc.estimate) <= mc.half_width;
  }
  emit(c, j, out);
  return kExitOk;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    const auto& cmd = config.command;
    if (cmd == "profile") return cmd_profile(config, out, err);
    if (cmd == "subordinator") return cmd_subordinator(config, out, err);
    if (cmd == "theta") return cmd_theta(config, out);
    if (cmd == "simulate") return cmd_simulate(config, out);
    if (cmd == "verify") return cmd_verify(config, out, err);
    return cmd_oracle(config, out);
  } catch (const NonConvergedQuadrature& e) {
    err << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const MaxIterExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace fracdim
