#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "comte/cli.hpp"
#include "comte/dataset_io.hpp"

namespace fs = std::filesystem;
using comte::ordered_json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "comte");
  std::ostringstream out, err;
  const int code = comte::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("comte_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::string kDemo = std::string(COMTE_DATA_DIR) + "/setcover_demo";

}  // namespace

TEST_CASE("set-cover demo explanation") {
  auto r = cli({"explain", "--train", kDemo + "/train.ndjson", "--sample", "zeros",
                "--target-class", "1", "--classifier", "builtin:" + kDemo + "/forest.json"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  auto j = ordered_json::parse(r.out);
  CHECK(j["distractor_id"] == "ones");
  CHECK(j["mask"] == ordered_json::parse("[0,1,1,0,0,1]"));
  CHECK(j["achieved_probability"] == 1.0);
  CHECK(j["method"] == "greedy");
  CHECK(j["substitutions"].size() == 3);
  // repeat runs are byte-identical
  CHECK(cli({"explain", "--train", kDemo + "/train.ndjson", "--sample", "zeros", "--target-class",
             "1", "--classifier", "builtin:" + kDemo + "/forest.json"})
            .out == r.out);
}

TEST_CASE("error reporting") {
  TempDir tmp;
  {
    std::ofstream f(tmp / "zeros.ndjson");
    f << slurp(kDemo + "/train.ndjson").substr(0, slurp(kDemo + "/train.ndjson").find('\n') + 1);
  }
  auto r = cli({"explain", "--train", tmp / "zeros.ndjson", "--sample", "zeros", "--target-class",
                "1", "--classifier", "builtin:" + kDemo + "/forest.json"});
  CHECK(r.code == 2);
  auto e = ordered_json::parse(r.err);
  CHECK(e["error"]["code"] == "no-distractor");

  CHECK(cli({"explain", "--bogus"}).code == 64);
  CHECK(cli({}).code == 64);
  auto missing = cli({"normalize", "--train", tmp / "nope.ndjson", "--out", tmp / "p.json"});
  CHECK(missing.code == 2);
  CHECK(ordered_json::parse(missing.err)["error"]["code"] == "io-error");
  auto bad_classifier = cli({"explain", "--train", kDemo + "/train.ndjson", "--sample", "zeros",
                             "--target-class", "1", "--classifier", "python:x"});
  CHECK(bad_classifier.code == 2);
}

TEST_CASE("end-to-end pipeline on a generated dataset") {
  TempDir tmp;
  auto gen = cli({"generate", "--metrics", "6", "--length", "12", "--samples", "60", "--classes",
                  "a,b", "--signal", "a:0:level:1.5", "--signal", "b:2:trend:2", "--noise", "0.05",
                  "--seed", "3", "--out", tmp / "train.ndjson", "--manifest", tmp / "manifest.json"});
  REQUIRE_MESSAGE(gen.code == 0, gen.err);
  CHECK(ordered_json::parse(slurp(tmp / "manifest.json"))["signal_metrics"] ==
        ordered_json::parse(R"(["metric_0","metric_2"])"));
  REQUIRE(cli({"generate", "--metrics", "6", "--length", "12", "--samples", "10", "--classes", "a,b",
               "--signal", "a:0:level:1.5", "--signal", "b:2:trend:2", "--noise", "0.05", "--seed",
               "4", "--id-prefix", "q", "--out", tmp / "test.ndjson"})
              .code == 0);
  REQUIRE(cli({"normalize", "--train", tmp / "train.ndjson", "--out", tmp / "params.json"}).code == 0);
  auto trained = cli({"train-logistic", "--train", tmp / "train.ndjson", "--params",
                      tmp / "params.json", "--l1", "0.02", "--out", tmp / "model.json"});
  REQUIRE_MESSAGE(trained.code == 0, trained.err);
  const auto summary = ordered_json::parse(trained.out);
  CHECK(summary["nonzero_features"].get<int>() >= 1);

  const std::vector<std::string> common{"--train", tmp / "train.ndjson", "--params",
                                        tmp / "params.json", "--classifier",
                                        "builtin:" + tmp / "model.json"};
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail = {}) {
    head.insert(head.end(), common.begin(), common.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };
  auto ex = cli(with({"explain", "--test", tmp / "test.ndjson", "--sample", "q1",
                      "--target-class", "a", "--out", tmp / "exp.json"}));
  REQUIRE_MESSAGE(ex.code == 0, ex.err);
  const auto exp = ordered_json::parse(slurp(tmp / "exp.json"));
  CHECK(exp["sample_id"] == "q1");
  CHECK(exp["tau_qualified"] == true);
  CHECK(exp["achieved_probability"].get<double>() >= 0.95);

  auto serial = cli(with({"explain", "--test", tmp / "test.ndjson", "--sample", "q1",
                          "--target-class", "a", "--serial"}));
  CHECK(ordered_json::parse(serial.out).dump(2) == exp.dump(2));

  auto faith = cli({"evaluate", "faithfulness", "--explanation", tmp / "exp.json", "--model",
                    tmp / "model.json"});
  REQUIRE_MESSAGE(faith.code == 0, faith.err);
  CHECK(ordered_json::parse(faith.out)["precision"] == 1.0);

  auto comp = cli({"evaluate", "comprehensibility", "--explanation", tmp / "exp.json"});
  CHECK(ordered_json::parse(comp.out)["comprehensibility"] == exp["substitutions"].size());

  auto genz = cli(with({"evaluate", "generalizability", "--explanation", tmp / "exp.json",
                        "--cohort", tmp / "test.ndjson"}));
  REQUIRE_MESSAGE(genz.code == 0, genz.err);
  const double ratio = ordered_json::parse(genz.out)["ratio"];
  CHECK(ratio >= 0.0);
  CHECK(ratio <= 1.0);

  for (std::string kind : {"search", "random"}) {
    auto rob = cli(with({"evaluate", "robustness", "--test", tmp / "test.ndjson", "--sample", "q1",
                         "--target-class", "a", "--k", "5", "--explainer", kind}));
    REQUIRE_MESSAGE(rob.code == 0, rob.err);
    CHECK(ordered_json::parse(rob.out)["neighbor_count"] == 5);
  }

  REQUIRE(cli({"plot-data", "--explanation", tmp / "exp.json", "--out", tmp / "plot.csv"}).code == 0);
  const auto csv = slurp(tmp / "plot.csv");
  CHECK(csv.rfind("metric,timestep,test_value,distractor_value\n", 0) == 0);
}

TEST_CASE("hill climbing seed comes from COMTE_SEED") {
  const std::vector<std::string> args{"explain", "--train", kDemo + "/train.ndjson", "--sample",
                                      "zeros", "--target-class", "1", "--classifier",
                                      "builtin:" + kDemo + "/forest.json", "--method", "hillclimb",
                                      "--delta", "0"};
  auto explicit_seed = args;
  explicit_seed.insert(explicit_seed.end(), {"--seed", "7"});
  ::setenv("COMTE_SEED", "7", 1);
  auto env = cli(args);
  ::unsetenv("COMTE_SEED");
  REQUIRE_MESSAGE(env.code == 0, env.err);
  CHECK(env.out == cli(explicit_seed).out);
  ::setenv("COMTE_SEED", "seven", 1);
  CHECK(cli(args).code == 2);
  ::unsetenv("COMTE_SEED");
}

TEST_CASE("external classifier over the wire") {
  TempDir tmp;
  {
    std::ofstream f(tmp / "train.ndjson");
    f << R"({"sample_id":"lo1","label":"lo","metrics":{"a":[0,0],"b":[0,1]}})" << '\n'
      << R"({"sample_id":"hi1","label":"hi","metrics":{"a":[1,1],"b":[0,1]}})" << '\n'
      << R"({"sample_id":"x","label":"lo","metrics":{"a":[0,0.1],"b":[1,0]}})" << '\n';
  }
  auto r = cli({"explain", "--train", tmp / "train.ndjson", "--sample", "x", "--target-class", "hi",
                "--classifier", std::string("exec:") + COMTE_WIRE_STUB + " mean0"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  auto j = ordered_json::parse(r.out);
  CHECK(j["distractor_id"] == "hi1");
  CHECK(j["mask"] == ordered_json::parse("[1,0]"));

  auto bad = cli({"explain", "--train", tmp / "train.ndjson", "--sample", "x", "--target-class",
                  "hi", "--classifier", std::string("exec:") + COMTE_WIRE_STUB + " half"});
  CHECK(bad.code == 2);
  CHECK(ordered_json::parse(bad.err)["error"]["code"] == "classifier-failure");
}

TEST_CASE("the installed binary reports errors on stderr with a nonzero exit") {
  const std::string cmd = std::string(COMTE_CLI) + " explain --train " + kDemo +
                          "/train.ndjson --sample nope --target-class 1 --classifier builtin:" +
                          kDemo + "/forest.json 2>/dev/null";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
