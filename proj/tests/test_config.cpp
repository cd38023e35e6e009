#include <sstream>

#include "doctest.h"
#include "fracdim/config.hpp"
#include "fracdim/errors.hpp"
#include "fracdim/run.hpp"
#include "fracdim/verify.hpp"

using namespace fracdim;

namespace {

std::string error_of(const RunConfig& c) {
  try {
    validate(c);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("descriptors") {
  CHECK(parse_set(Json("cantor3")).id() == "cantor3");
  CHECK(parse_set(Json("interval:0,1")).id() == "interval:0,1");
  CHECK(parse_set(Json("points:0.5,0.25")).id() == "points:0.25,0.5");
  CHECK(parse_set(Json::parse(R"({"kind":"interval","params":[0,2]})")).hull().second == 2.0);
  CHECK(parse_set(Json::parse(R"({"kind":"ifs","params":[[0.25,0],[0.25,0.5]],"depth":10})")).id() ==
        "ifs:0.25,0;0.25,0.5");
  CHECK(parse_set(Json("ifs:0.25,0;0.25,0.75")).id() == "ifs:0.25,0;0.25,0.75");
  const auto u = parse_set(Json::parse(R"({"kind":"union","params":["cantor3","points:2"]})"));
  CHECK(u.id() == "union(cantor3|points:2)");

  CHECK(parse_phi(Json("stable:0.5")).tag() == "stable:0.5");
  CHECK(parse_phi(Json("gamma:1,2")).tag() == "gamma:1,2");
  CHECK(parse_phi(Json("cpd:1,0.5,0.1")).tag() == "cpd:1,0.5,0.1");
  CHECK(parse_phi(Json::parse(R"({"family":"gamma","params":[2,3]})"))(3.0) == doctest::Approx(2.0 * std::log(2.0)));
  CHECK(parse_phi(Json::parse(R"({"family":"tabulated","params":[[1,1],[2,1.5]]})"))(2.0) == 1.5);

  CHECK(parse_model(Json::parse(R"({"kind":"isotropic_stable","alpha":1.5,"scale":2,"d":2})")).tag() ==
        "isotropic_stable(alpha=1.5,c=2,d=2)");
  CHECK(parse_model(Json::parse(R"({"kind":"subordinator","phi":{"family":"stable","params":[0.3]}})")).tag() ==
        "subordinator(stable:0.3)");
  CHECK(parse_model(Json::parse(R"({"kind":"subordinate_brownian","phi":"gamma:1,1","d":3})")).dim() == 3);

  CHECK_THROWS_WITH_AS(parse_phi(Json("stable:abc")), doctest::Contains("phi.params"), InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_phi(Json("weird:1")), doctest::Contains("phi.family"), InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_set(Json("disc:1")), doctest::Contains("set.kind"), InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_set(Json("interval:0")), doctest::Contains("set.params"), InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_model(Json::parse(R"({"kind":"subordinator"})")), doctest::Contains("model.phi"),
                       InvalidArgument);
}

TEST_CASE("ladder strings") {
  const auto l = parse_ladder("0.1,0.5,8");
  CHECK(l.start == 0.1);
  CHECK(l.ratio == 0.5);
  CHECK(l.count == 8);
  CHECK(l.values().size() == 8);
  CHECK_THROWS_WITH_AS(parse_ladder("0.1,0.5"), doctest::Contains("ladder"), InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_ladder("0.1,x,3"), doctest::Contains("ladder.ratio"), InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_ladder("0.1,0.5,2.5"), doctest::Contains("ladder.count"), InvalidArgument);
}

TEST_CASE("every field round-trips through the config record") {
  RunConfig c;
  c.command = "simulate";
  c.set = "cantor3";
  c.family = "fh";
  c.s = 1.25;
  c.model = "isotropic_stable";
  c.alpha = 0.8;
  c.c = 2.0;
  c.d = 2;
  c.phi = "gamma:1,2";
  c.ladder = LadderSpec{0.1, 0.5, 8};
  c.tol = 1e-7;
  c.seed = 12345678901234ull;
  c.paths = 16;
  c.mesh_factor = 0.25;
  c.mode = "lower";
  c.restarts = 3;
  c.lambda_max = 1e30;
  c.band = 0.2;
  c.eps = 0.01;
  c.t = 0.5;
  c.samples = 1000;
  c.suite = "fast";
  c.out = "a b.json";
  c.csv = "x,y.csv";
  const auto j = config_to_json(c);
  CHECK(config_from_json(j) == c);
  CHECK(config_from_json(Json::parse(j.dump())) == c);
  // keys come out sorted
  const auto text = j.dump();
  CHECK(text.find("\"alpha\"") < text.find("\"band\""));

  RunConfig empty;
  empty.command = "theta";
  CHECK(config_from_json(config_to_json(empty)) == empty);
}

TEST_CASE("model objects and ladder strings in the file form") {
  const auto c = config_from_json(Json::parse(
      R"({"command":"simulate","model":{"kind":"subordinator","phi":"stable:0.5"},"ladder":"0.125,0.5,7","seed":3})"));
  CHECK(c.model == "subordinator");
  CHECK(model_from_config(c).tag() == "subordinator(stable:0.5)");
  CHECK(c.ladder->count == 7);
  CHECK_THROWS_WITH_AS(config_from_json(Json::parse(R"({"command":"theta","sigma":1})")), doctest::Contains("sigma"),
                       InvalidArgument);
}

TEST_CASE("flags override file fields") {
  RunConfig file;
  file.command = "profile";
  file.s = 1.0;
  file.family = "fh";
  RunConfig flags;
  flags.s = 1.5;
  flags.out = "r.json";
  const auto m = merge(file, flags);
  CHECK(m.command == "profile");
  CHECK(*m.s == 1.5);
  CHECK(*m.family == "fh");
  CHECK(*m.out == "r.json");
}

TEST_CASE("validation names the offending field") {
  RunConfig c;
  c.command = "profile";
  c.set = "cantor3";
  c.family = "fh";
  c.s = 1.0;
  c.ladder = LadderSpec{0.1, 0.5, 2};
  CHECK(error_of(c).rfind("ladder.count", 0) == 0);
  c.ladder = LadderSpec{0.1, 2.0, 8};
  CHECK(error_of(c).rfind("ladder.ratio", 0) == 0);
  c.ladder = LadderSpec{0.1, 0.5, 8};
  CHECK(error_of(c).empty());

  RunConfig sub;
  sub.command = "subordinator";
  sub.phi = "stable:0.5";
  sub.ladder = LadderSpec{10, 0.5, 8};
  CHECK(error_of(sub).rfind("ladder.ratio", 0) == 0);
  sub.ladder = LadderSpec{10, 2.0, 8};
  CHECK(error_of(sub).empty());

  RunConfig sim;
  sim.command = "simulate";
  sim.alpha = 2.0;
  sim.ladder = LadderSpec{0.125, 0.5, 7};
  CHECK(error_of(sim).rfind("seed", 0) == 0);

  RunConfig bad;
  bad.command = "plot";
  CHECK(error_of(bad).rfind("command", 0) == 0);
}

TEST_CASE("exit codes") {
  std::ostringstream out, err;
  RunConfig c;
  c.command = "theta";
  c.phi = "stable:0.5";
  c.s = 0.7;
  CHECK(run(c, out, err) == kExitOk);
  CHECK(out.str().find("theta 0.2857") != std::string::npos);
  CHECK(out.str().find("prediction 0.5000") != std::string::npos);

  c.s = 0.3;  // below the admissible range
  CHECK(run(c, out, err) == kExitValidation);
  c.s.reset();
  err.str("");
  CHECK(run(c, out, err) == kExitValidation);
  CHECK(err.str().find("s:") != std::string::npos);

  // a relative gap of 1e-300 is out of reach for the solver
  RunConfig p;
  p.command = "profile";
  p.set = "points:0,0.3,1";
  p.family = "fh";
  p.s = 0.5;
  p.ladder = LadderSpec{0.5, 0.5, 4};
  p.tol = 1e-300;
  CHECK(run(p, out, err) == kExitNonConvergence);
}

TEST_CASE("profile reports serialize deterministically") {
  RunConfig c;
  c.command = "profile";
  c.set = "points:0,0.5,1";
  c.family = "fh";
  c.s = 1.0;
  c.ladder = LadderSpec{0.4, 0.5, 5};
  std::ostringstream a, b, err;
  CHECK(run(c, a, err) == kExitOk);
  CHECK(run(c, b, err) == kExitOk);
  CHECK(a.str() == b.str());
  const auto j = Json::parse(a.str());
  CHECK(j.at("set") == "points:0,0.5,1");
  CHECK(j.at("points").size() == 5);
  CHECK(j.at("points")[0].contains("Z"));
  CHECK(j.at("points")[0].contains("gap"));
  CHECK(j.at("points")[0].contains("iters"));
}

TEST_CASE("profile CSV rows") {
  ProfileReport r;
  r.set_id = "union(cantor3|points:2)";
  r.family = "fh(s=1)";
  r.parameter = "s=1";
  r.points.push_back(ProfilePoint{0.1, 0.01, 10, 0.5});
  std::ostringstream os;
  write_profile_csv(os, r);
  CHECK(os.str() == "set,family,s_or_phi,scale,Z_or_value\r\nunion(cantor3|points:2),fh(s=1),s=1,0.10000000000000001,0.5\r\n");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("fast verification criteria") {
  for (int id : {1, 4, 9}) CHECK(run_criterion(id, kDefaultVerifySeed).pass);
  CHECK(suite_criteria(Suite::Full).size() == 13);
  CHECK_THROWS_AS(suite_from_string("medium"), InvalidArgument);
}
