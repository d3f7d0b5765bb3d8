/*
   Copyright 2026 The kpzlab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = kpzlab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("kpzlab-cli-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> csvs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".csv") out[e.path().filename().string()] = slurp(e.path());
  }
  return out;
}

const std::vector<std::vector<std::string>> kSmall = {
    {"selftest", "--n-samples", "100"},
    {"variation", "--n-lines", "32", "--n-samples", "20", "--eps-lines", "1,2,4", "--target", "both"},
    {"tails", "--n-lines", "32", "--n-samples", "500", "--eps-lines", "2"},
    {"environment", "--n-lines", "32", "--n-samples", "40", "--eps-lines", "1,2", "--probes", "0,0.5"},
    {"limit-env", "--n-lines", "32", "--n-samples", "40", "--window", "3"},
    {"independence", "--n-lines", "32", "--n-samples", "40", "--eps-lines", "2"},
    {"holder", "--n-lines", "32", "--n-samples", "30", "--resolutions", "2,8,32"},
    {"invariance", "--n-lines", "32", "--n-samples", "40"},
};

}  // namespace

TEST_CASE("cli outputs do not depend on the worker count") {
  for (auto args : kSmall) {
    const std::string sub = args[0];
    CAPTURE(sub);
    args.insert(args.end(), {"--seed", "11", "--calibration-samples", "20"});
    const auto d1 = scratch(sub + "-1"), d4 = scratch(sub + "-4");
    auto a1 = args, a4 = args;
    a1.insert(a1.end(), {"--workers", "1", "--out-dir", d1.string()});
    a4.insert(a4.end(), {"--workers", "4", "--out-dir", d4.string()});
    const auto r1 = invoke(a1), r4 = invoke(a4);
    CHECK(r1.err == "");
    CHECK(r1.code != kpzlab::cli::kConfigError);
    CHECK(r1.code == r4.code);
    CHECK(r1.out == r4.out);
    const auto c1 = csvs(d1), c4 = csvs(d4);
    REQUIRE(!c1.empty());
    CHECK(c1 == c4);
    for (const auto& [name, body] : c1) {
      CHECK(body.rfind("# kpzlab " + std::string(kpzlab::cli::kVersion) + " " + sub + "\n", 0) == 0);
    }
    CHECK(fs::exists(d1 / (sub + "-11.json")));
    fs::remove_all(d1);
    fs::remove_all(d4);
  }
}

TEST_CASE("cli exit codes") {
  const auto d = scratch("codes");
  CHECK(invoke({}).code == kpzlab::cli::kConfigError);
  CHECK(invoke({"nonsense"}).code == kpzlab::cli::kConfigError);
  CHECK(invoke({"--help"}).code == kpzlab::cli::kPass);
  CHECK(invoke({"tails", "--band", "0.5", "--out-dir", d.string()}).code == kpzlab::cli::kConfigError);
  CHECK(invoke({"variation", "--target", "both", "--alphas", "1", "--out-dir", d.string()}).code ==
        kpzlab::cli::kConfigError);
  CHECK(invoke({"variation", "--eps-lines", "4,x", "--out-dir", d.string()}).code ==
        kpzlab::cli::kConfigError);
  CHECK(invoke({"selftest", "--workers", "0"}).code == kpzlab::cli::kConfigError);
  // too few replicas for the tail fit
  CHECK(invoke({"tails", "--n-lines", "32", "--n-samples", "50", "--eps-lines", "2",
                "--calibration-samples", "20", "--out-dir", d.string()})
            .code == kpzlab::cli::kConfigError);
  const auto ok = invoke({"selftest", "--out-dir", d.string(), "--seed", "3"});
  CHECK(ok.code == kpzlab::cli::kPass);
  CHECK(ok.out.find("PASS selftest/oracle_equivalence") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("cli config file and flag precedence") {
  const auto d = scratch("config");
  fs::create_directories(d);
  {
    std::ofstream cfg(d / "run.toml");
    cfg << "seed = 21\nn-samples = 100\n";
  }
  auto r = invoke({"selftest", "--config", (d / "run.toml").string(), "--out-dir", d.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(d / "selftest-21.csv"));
  r = invoke({"selftest", "--config", (d / "run.toml").string(), "--seed", "22", "--out-dir",
              d.string()});
  CHECK(fs::exists(d / "selftest-22.csv"));
  const std::string body = slurp(d / "selftest-22.csv");
  CHECK(body.find("\"instances\":100") != std::string::npos);
  fs::remove_all(d);
}
