// Command-line runner: fracdim <command> [flags]. Flags override fields of --config.

#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fracdim/config.hpp"
#include "fracdim/errors.hpp"
#include "fracdim/run.hpp"

using namespace fracdim;

namespace {

struct Flags {
  std::string config, set, family, model, phi, ladder, mode, suite, out, csv;
  double s = 0, alpha = 0, c = 0, tol = 0, mesh_factor = 0, lambda_max = 0, band = 0, eps = 0, t = 0;
  int d = 0, paths = 0, restarts = 0;
  std::uint64_t seed = 0, samples = 0;
  bool print_config = false;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "flat JSON config file; flags override its fields");
  app->add_option("--set", f.set, "set descriptor: cantor3, interval:a,b, points:x,y,..., ifs:r,t;r,t");
  app->add_option("--family", f.family, "kernel family: fh, sandwich, subordinator, exact, levy");
  app->add_option("--s", f.s, "profile parameter s");
  app->add_option("--model", f.model, "isotropic_stable, subordinator or subordinate_brownian");
  app->add_option("--alpha", f.alpha, "stability index");
  app->add_option("--c", f.c, "stable scale c in Psi(z) = c|z|^alpha");
  app->add_option("--d", f.d, "spatial dimension");
  app->add_option("--phi", f.phi, "Laplace exponent: stable:b, gamma:a,b, cpd:rate,mean,drift");
  app->add_option("--ladder", f.ladder, "start,ratio,count");
  app->add_option("--tol", f.tol, "solver or quadrature tolerance");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--paths", f.paths, "number of simulated paths");
  app->add_option("--mesh-factor", f.mesh_factor, "net mesh relative to the scale");
  app->add_option("--mode", f.mode, "slope mode: least_squares, upper, lower");
  app->add_option("--restarts", f.restarts, "extra random starts for nonconvex energies");
  app->add_option("--lambda-max", f.lambda_max, "upper end of the theta integral");
  app->add_option("--band", f.band, "tolerance band for theory against simulation");
  app->add_option("--eps", f.eps, "ball radius for the oracle command");
  app->add_option("--t", f.t, "time lag for the oracle command");
  app->add_option("--samples", f.samples, "Monte Carlo sample count");
  app->add_option("--suite", f.suite, "verification suite: fast or full");
  app->add_option("--out", f.out, "JSON report path");
  app->add_option("--csv", f.csv, "CSV output path");
  app->add_flag("--print-config", f.print_config, "print the merged config record and exit");
}

template <class T>
void take(const CLI::App* app, const char* flag, const T& value, std::optional<T>& field) {
  if (app->count(flag)) field = value;
}

RunConfig from_flags(const CLI::App* app, const Flags& f) {
  RunConfig c;
  c.command = app->get_name();
  if (app->count("--set")) c.set = f.set;
  if (app->count("--phi")) c.phi = f.phi;
  if (app->count("--ladder")) c.ladder = parse_ladder(f.ladder);
  take(app, "--family", f.family, c.family);
  take(app, "--s", f.s, c.s);
  take(app, "--model", f.model, c.model);
  take(app, "--alpha", f.alpha, c.alpha);
  take(app, "--c", f.c, c.c);
  take(app, "--d", f.d, c.d);
  take(app, "--tol", f.tol, c.tol);
  take(app, "--seed", f.seed, c.seed);
  take(app, "--paths", f.paths, c.paths);
  take(app, "--mesh-factor", f.mesh_factor, c.mesh_factor);
  take(app, "--mode", f.mode, c.mode);
  take(app, "--restarts", f.restarts, c.restarts);
  take(app, "--lambda-max", f.lambda_max, c.lambda_max);
  take(app, "--band", f.band, c.band);
  take(app, "--eps", f.eps, c.eps);
  take(app, "--t", f.t, c.t);
  take(app, "--samples", f.samples, c.samples);
  take(app, "--suite", f.suite, c.suite);
  take(app, "--out", f.out, c.out);
  take(app, "--csv", f.csv, c.csv);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw InvalidArgument("config: " + std::string(e.what()));
  }
  return config_from_json(j);
}

void apply_thread_cap() {
  const char* env = std::getenv("FRACDIM_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw InvalidArgument("FRACDIM_THREADS: expected a positive integer");
  omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracdim: dimension profiles of Levy images"};
  app.require_subcommand(1);
  Flags flags;
  const char* commands[][2] = {{"profile", "capacity-energy profile of a set"},
                               {"subordinator", "subordinator criterion over a lambda ladder"},
                               {"theta", "theta index and the predicted FH profile"},
                               {"simulate", "simulated image dimension experiment"},
                               {"verify", "acceptance suite"},
                               {"oracle", "small-ball probability by quadrature and Monte Carlo"}};
  for (const auto& cmd : commands) add_flags(app.add_subcommand(cmd[0], cmd[1]), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    apply_thread_cap();
    const CLI::App* sub = app.get_subcommands().front();
    RunConfig config = from_flags(sub, flags);
    if (!flags.config.empty()) {
      RunConfig file = load_config(flags.config);
      if (!file.command.empty() && file.command != config.command) {
        throw InvalidArgument("command: config file says '" + file.command + "' but the command line says '" +
                              config.command + "'");
      }
      config = merge(std::move(file), config);
    }
    if (flags.print_config) {
      std::cout << config_to_json(config).dump(2) << "\n";
      return kExitOk;
    }
    return run(config, std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
