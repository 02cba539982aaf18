#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "veronese/cli.hpp"
#include "veronese/code.hpp"

using nlohmann::json;

namespace {

struct Run {
  int rc;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "veronese");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = veronese::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("veronese_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Removes the volatile "timings" block from a report text.
std::string without_timings(const std::string& text) {
  auto j = json::parse(text);
  j.erase("timings");
  return j.dump();
}

}  // namespace

TEST_CASE("field command") {
  auto r = run({"field", "--p", "3", "--m", "3"});
  CHECK(r.rc == 0);
  auto j = json::parse(r.out);
  CHECK(j.at("modulus_string") == "x^3 + 2x + 1");
  CHECK(j.at("subfields") == std::vector<int>{3, 27});

  r = run({"field", "--p", "2", "--m", "2"});
  CHECK(json::parse(r.out).at("modulus_string") == "x^2 + x + 1");

  r = run({"field", "--p", "4", "--m", "2"});
  CHECK(r.rc == 1);
  CHECK(r.err.find("not prime") != std::string::npos);

  CHECK(run({"field", "--p", "2"}).rc == 1);
  CHECK(run({"--help"}).rc == 0);
}

TEST_CASE("build command") {
  auto r = run({"build", "--p", "3", "--e", "1", "--t", "3", "--n", "2", "--sigma", "0,0,2", "--quiet"});
  CHECK(r.rc == 0);
  const auto j = json::parse(r.out);
  CHECK(j.at("coords").size() == 28);
  CHECK(j.at("coords")[0].size() == 6);

  r = run({"build", "--p", "2", "--e", "1", "--t", "3", "--n", "2", "--sigma", "0,0,1", "--quiet"});
  CHECK(r.rc == 0);
  CHECK(r.err.find("collapse: 5 of 6 monomials distinct") != std::string::npos);

  r = run({"build", "--p", "2", "--e", "1", "--t", "3", "--n", "2", "--sigma", "0,0,0,0,0,0,0,0"});
  CHECK(r.rc == 1);
  CHECK(r.err.find("norm") != std::string::npos);
  r = run({"build", "--p", "2", "--e", "1", "--t", "3", "--n", "2", "--sigma", "0,0,0,0,0,0,0,0", "--allow-collapse"});
  CHECK(r.rc == 1);

  r = run({"build", "--p", "2", "--t", "3", "--sigma", "1,2"});
  CHECK(r.rc == 1);
  CHECK(r.err.find("identity") != std::string::npos);

  const auto csv = temp_path("h.csv");
  r = run({"build", "--p", "2", "--t", "2", "--sigma", "0,1", "--csv", csv.string(), "--quiet"});
  CHECK(r.rc == 0);
  const auto text = slurp(csv);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  std::filesystem::remove(csv);
}

TEST_CASE("sigma as powers of q") {
  const auto a = run({"build", "--p", "2", "--e", "2", "--t", "2", "--sigma-q", "0,1", "--quiet"});
  const auto b = run({"build", "--p", "2", "--e", "2", "--t", "2", "--sigma", "0,2", "--quiet"});
  CHECK(a.rc == 0);
  CHECK(a.out == b.out);
  CHECK(run({"build", "--p", "2", "--e", "2", "--t", "2", "--sigma-q", "0,1", "--sigma", "0,2"}).rc == 1);
}

TEST_CASE("code command") {
  auto r = run({"code", "--p", "5", "--e", "1", "--t", "1", "--n", "2", "--sigma", "0,0", "--quiet"});
  CHECK(r.rc == 0);
  auto j = json::parse(r.out);
  CHECK(j.at("nu") == 6);
  CHECK(j.at("kappa") == 3);
  CHECK(j.at("delta") == 4);
  CHECK(j.at("status") == "MDS");
  CHECK(j.at("canonical_hash") == veronese::canonical_hash(j));
  CHECK(j.at("timings").contains("generated_at"));

  r = run({"code", "--p", "2", "--e", "1", "--t", "5", "--n", "2", "--sigma", "0,2", "--quiet", "--workers", "2"});
  CHECK(r.rc == 0);
  j = json::parse(r.out);
  CHECK(j.at("nu") == 33);
  CHECK(j.at("kappa") == 29);
  CHECK(j.at("delta") == 5);
  CHECK(j.at("status") == "MDS");

  r = run({"code", "--p", "2", "--t", "3", "--sigma", "0,0,1"});
  CHECK(r.rc == 1);
  CHECK(r.err.find("allow-collapse") != std::string::npos);
  r = run({"code", "--p", "2", "--t", "3", "--sigma", "0,0,1", "--allow-collapse", "--quiet"});
  CHECK(r.rc == 0);
}

TEST_CASE("budgets: flag, environment and config file") {
  const std::vector<std::string> track = {"code", "--p", "3", "--t", "3", "--sigma", "0,0,2", "--quiet"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = track;
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  };
  auto r = with({"--budget", "1000"});
  CHECK(r.rc == 2);
  auto j = json::parse(r.out);
  CHECK(j.at("delta").is_null());
  CHECK(j.at("delta_exact") == false);
  CHECK(j.at("delta_lower_bound") == 3);  // below C(28, 4): only injectivity is proven

  const auto cfg = temp_path("config.json");
  std::ofstream(cfg) << R"({"budget": 1000, "workers": 2})";
  CHECK(with({"--config", cfg.string()}).rc == 2);
  CHECK(with({"--config", cfg.string(), "--budget", "100000000"}).rc == 0);

  setenv("VERONESE_BUDGET", "100000000", 1);
  CHECK(with({"--config", cfg.string()}).rc == 0);  // environment beats the config file
  CHECK(with({"--budget", "1000"}).rc == 2);        // flag beats the environment
  setenv("VERONESE_BUDGET", "lots", 1);
  CHECK(with({}).rc == 1);
  unsetenv("VERONESE_BUDGET");

  std::ofstream(cfg) << R"({"p": 5, "t": 1, "sigma": [0, 0], "quiet": true})";
  r = run({"code", "--config", cfg.string()});
  CHECK(r.rc == 0);
  CHECK(json::parse(r.out).at("delta") == 4);
  std::filesystem::remove(cfg);
}

TEST_CASE("reports are byte-identical apart from timings") {
  const auto a = temp_path("a.json"), b = temp_path("b.json");
  const std::vector<std::string> base = {"code", "--p", "2", "--t", "4", "--sigma", "0,2", "--quiet"};
  auto args = base;
  args.insert(args.end(), {"--workers", "1", "--output", a.string()});
  CHECK(run(args).rc == 0);
  args = base;
  args.insert(args.end(), {"--workers", "4", "--output", b.string()});
  CHECK(run(args).rc == 0);
  const auto ta = slurp(a), tb = slurp(b);
  CHECK(without_timings(ta) == without_timings(tb));
  CHECK(json::parse(ta).at("canonical_hash") == json::parse(tb).at("canonical_hash"));
  CHECK(json::parse(ta).at("min_weight_support_count") == 340);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST_CASE("variety files feed the code command") {
  const auto v = temp_path("variety.json");
  CHECK(run({"build", "--p", "3", "--t", "3", "--sigma", "0,0,2", "--quiet", "-o", v.string()}).rc == 0);
  auto from_file = run({"code", "--input", v.string(), "--quiet"});
  auto direct = run({"code", "--p", "3", "--t", "3", "--sigma", "0,0,2", "--quiet"});
  CHECK(from_file.rc == 0);
  CHECK(without_timings(from_file.out) == without_timings(direct.out));
  CHECK(json::parse(direct.out).at("delta") == 6);
  CHECK(json::parse(direct.out).at("status") == "almost-MDS");

  auto j = json::parse(slurp(v));
  j["coords"][2][2] = (j["coords"][2][2].get<int>() + 1) % 27;
  std::ofstream(v) << j.dump();
  CHECK(run({"code", "--input", v.string(), "--quiet"}).rc == 1);
  std::filesystem::remove(v);
}

TEST_CASE("verify command") {
  auto r = run({"verify", "general-position", "--k", "4", "--p", "3", "--t", "3", "--sigma", "0,0,2", "--quiet"});
  CHECK(r.rc == 0);
  CHECK(json::parse(r.out).at("pass") == true);
  CHECK(json::parse(r.out).at("subsets_checked") == 20475);

  r = run({"verify", "general-position", "--k", "4", "--p", "5", "--t", "1", "--sigma", "0,0", "--quiet"});
  CHECK(r.rc == 1);
  CHECK(json::parse(r.out).at("counterexample") == std::vector<int>{0, 1, 2, 3});

  r = run({"verify", "dep-classification", "--p", "2", "--t", "4", "--sigma", "0,2", "--quiet"});
  CHECK(r.rc == 0);
  CHECK(json::parse(r.out).at("supports_classified") == 340);

  r = run({"verify", "dep-classification", "--p", "3", "--t", "3", "--sigma", "0,0,2", "--quiet"});
  CHECK(r.rc == 0);
  CHECK(json::parse(r.out).at("exhaustive_subsets_checked") == 98280);

  r = run({"verify", "oracle-equivalence", "--p", "2", "--t", "2", "--sigma", "0,1", "--quiet"});
  CHECK(r.rc == 0);
  CHECK(json::parse(r.out).at("oracle_delta") == 5);

  r = run({"verify", "oracle-equivalence", "--p", "3", "--t", "4", "--sigma", "0,0,3", "--quiet"});
  CHECK(r.rc == 2);
  CHECK(json::parse(r.out).contains("budget_exceeded"));

  r = run({"verify", "scroll-plucker", "--p", "3", "--t", "3", "--n", "2", "--sigma", "0,0,2", "--quiet"});
  CHECK(r.rc == 0);
  CHECK(json::parse(r.out).at("points_checked") == 28);

  CHECK(run({"verify", "nonsense", "--p", "2", "--t", "2", "--sigma", "0,1"}).rc == 1);
  CHECK(run({"verify", "general-position", "--k", "6", "--p", "2", "--t", "2", "--sigma", "0,1", "--quiet"}).rc == 1);
}
