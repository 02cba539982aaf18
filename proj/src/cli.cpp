#include "veronese/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "parallel.hpp"
#include "subset_search.hpp"
#include "veronese/code.hpp"
#include "veronese/ff.hpp"
#include "veronese/variety.hpp"

namespace veronese::cli {
namespace {

using nlohmann::json;

constexpr const char* kBudgetEnv = "VERONESE_BUDGET";

class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Raw flag values plus the CLI11 handles needed to tell whether a flag was given.
struct Flags {
  std::uint32_t p = 0, e = 1, t = 1, n = 2;
  std::vector<std::uint32_t> sigma, sigma_q;
  std::uint64_t budget = kDefaultStageBudget;
  std::size_t w_max = 0, k = 0, max_supports = 10'000;
  unsigned workers = 0;
  bool allow_collapse = false, quiet = false, no_tables = false;
  std::string output, csv, input, config;
  std::map<std::string, CLI::Option*> opt;

  bool given(const std::string& key) const {
    auto it = opt.find(key);
    return it != opt.end() && it->second->count() > 0;
  }
};

// Resolved configuration: flags > environment (budgets only) > config file > defaults.
struct Config {
  std::optional<std::uint32_t> p, e, t, n;
  std::optional<std::vector<std::uint32_t>> sigma, sigma_q;
  std::uint64_t budget = kDefaultStageBudget;
  std::size_t w_max = 0, k = 0, max_supports = 10'000;
  unsigned workers = 1;
  bool allow_collapse = false, quiet = false, no_tables = false;
  std::string output, csv, input;
};

void add_config_flags(CLI::App* app, Flags& f) {
  f.opt["p"] = app->add_option("--p", f.p, "characteristic (prime)");
  f.opt["e"] = app->add_option("--e", f.e, "q = p^e");
  f.opt["t"] = app->add_option("--t", f.t, "field GF(q^t)");
  f.opt["n"] = app->add_option("--n", f.n, "points of PG(n-1, q^t)");
  f.opt["sigma"] = app->add_option("--sigma", f.sigma, "automorphism exponents as powers of p, e.g. 0,0,2")
                       ->delimiter(',');
  f.opt["sigma_q"] = app->add_option("--sigma-q", f.sigma_q, "automorphism exponents as powers of q")->delimiter(',');
  f.opt["workers"] = app->add_option("--workers", f.workers, "worker threads (default: available cores)");
  f.opt["allow_collapse"] = app->add_flag("--allow-collapse", f.allow_collapse, "accept sigma with monomial collapse");
  f.opt["quiet"] = app->add_flag("--quiet", f.quiet, "no progress on stderr");
  f.opt["no_tables"] = app->add_flag("--no-tables", f.no_tables, "polynomial-mode field arithmetic");
  f.opt["output"] = app->add_option("--output,-o", f.output, "report file (default: stdout)");
  f.opt["input"] = app->add_option("--input", f.input, "variety JSON written by `build`");
  app->add_option("--config", f.config, "JSON config with the same keys as the flags");
  app->get_option("--sigma")->excludes(app->get_option("--sigma-q"));
}

void add_search_flags(CLI::App* app, Flags& f) {
  f.opt["budget"] = app->add_option("--budget", f.budget, "maximum subsets examined per stage");
  f.opt["w_max"] = app->add_option("--w-max", f.w_max, "largest subset size searched (default effective_N + 1)");
  f.opt["max_supports"] = app->add_option("--max-supports", f.max_supports, "supports listed in the report");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

template <class T>
void merge(T& dst, const Flags& f, const T& flag_value, const json& cfg, const std::string& key) {
  if (f.given(key)) dst = flag_value;
  else if (cfg.contains(key)) dst = cfg.at(key).get<T>();
}

template <class T>
void merge(std::optional<T>& dst, const Flags& f, const T& flag_value, const json& cfg, const std::string& key) {
  if (f.given(key)) dst = flag_value;
  else if (cfg.contains(key)) dst = cfg.at(key).get<T>();
}

std::uint64_t parse_budget(const char* text) {
  std::string s(text);
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw UsageError(std::string(kBudgetEnv) + " must be a positive integer, got '" + s + "'");
  return v;
}

Config resolve(const Flags& f) {
  json cfg = json::object();
  if (!f.config.empty()) cfg = read_json_file(f.config);
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
  Config c;
  try {
    merge(c.p, f, f.p, cfg, "p");
    merge(c.e, f, f.e, cfg, "e");
    merge(c.t, f, f.t, cfg, "t");
    merge(c.n, f, f.n, cfg, "n");
    merge(c.sigma, f, f.sigma, cfg, "sigma");
    merge(c.sigma_q, f, f.sigma_q, cfg, "sigma_q");
    merge(c.w_max, f, f.w_max, cfg, "w_max");
    merge(c.k, f, f.k, cfg, "k");
    merge(c.max_supports, f, f.max_supports, cfg, "max_supports");
    merge(c.allow_collapse, f, f.allow_collapse, cfg, "allow_collapse");
    merge(c.quiet, f, f.quiet, cfg, "quiet");
    merge(c.no_tables, f, f.no_tables, cfg, "no_tables");
    merge(c.output, f, f.output, cfg, "output");
    merge(c.csv, f, f.csv, cfg, "csv");
    merge(c.input, f, f.input, cfg, "input");
    std::optional<unsigned> workers;
    merge(workers, f, f.workers, cfg, "workers");
    c.workers = workers.value_or(std::max(1u, std::thread::hardware_concurrency()));
    if (f.given("budget")) c.budget = f.budget;
    else if (const char* env = std::getenv(kBudgetEnv)) c.budget = parse_budget(env);
    else if (cfg.contains("budget")) c.budget = cfg.at("budget").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config file: ") + e.what());
  }
  if (c.sigma && c.sigma_q && !(f.given("sigma") || f.given("sigma_q")))
    throw UsageError("config gives both sigma and sigma_q; use one");
  if (f.given("sigma")) c.sigma_q.reset();
  if (f.given("sigma_q")) c.sigma.reset();
  if (c.workers == 0) throw UsageError("--workers must be at least 1");
  if (c.budget == 0) throw UsageError("--budget must be at least 1");
  return c;
}

void progress(const Config& c, std::ostream& err, const std::string& msg) {
  if (!c.quiet) err << msg << '\n';
}

void emit(const Config& c, std::ostream& out, const json& j) {
  const std::string text = j.dump(2) + "\n";
  if (c.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.output);
  if (!f) throw UsageError("cannot write " + c.output);
  f << text;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string collapse_note(const VarietyMatrix& v) {
  return "collapse: " + std::to_string(v.basis.effective_N()) + " of " + std::to_string(v.basis.expected_N) +
         " monomials distinct";
}

VarietyMatrix obtain_variety(const Config& c, std::ostream& err) {
  if (!c.input.empty()) {
    progress(c, err, "reading variety from " + c.input);
    return variety_from_json(read_json_file(c.input));
  }
  if (!c.p) throw UsageError("missing --p (characteristic)");
  if (!c.sigma && !c.sigma_q) throw UsageError("missing --sigma or --sigma-q");
  const auto field = build_field(*c.p, c.e.value_or(1), c.t.value_or(1), !c.no_tables);
  const auto sigma = c.sigma ? SigmaVector(*c.sigma, *field) : SigmaVector::from_q_powers(*c.sigma_q, *field);
  const std::size_t n = c.n.value_or(2);
  progress(c, err,
           "building variety: GF(" + std::to_string(field->order()) + "), n = " + std::to_string(n) + ", d = " +
               std::to_string(sigma.d()) + ", |sigma| = " + std::to_string(sigma.norm()));
  return build_variety(n, sigma, field, c.workers);
}

VarietyMatrix obtain_uncollapsed(const Config& c, std::ostream& err) {
  auto v = obtain_variety(c, err);
  if (v.basis.collapsed()) {
    if (!c.allow_collapse)
      throw UsageError(collapse_note(v) +
                       "; distinct tensor indices must give distinct monomials (pass --allow-collapse to continue)");
    err << "warning: " << collapse_note(v) << '\n';
  }
  return v;
}

SearchPlan plan_of(const Config& c) {
  SearchPlan plan;
  plan.w_max = c.w_max;
  plan.budget = c.budget;
  plan.workers = c.workers;
  plan.max_listed_supports = c.max_supports;
  return plan;
}

json config_json(const VarietyMatrix& v) {
  return {{"field", field_to_json(*v.field)},
          {"n", v.n},
          {"sigma_exponents", v.sigma.exponents()},
          {"d", v.sigma.d()},
          {"q_prime", v.sigma.fixed_subfield_order()},
          {"effective_N", v.basis.effective_N()},
          {"nu", v.points.size()}};
}

void finish(json& report) {
  report["timings"]["generated_at"] = utc_now();
  report["canonical_hash"] = canonical_hash(report);
}

int cmd_field(std::uint32_t p, std::uint32_t m, bool no_tables, const Config& c, std::ostream& out) {
  if (!is_prime(p)) throw UsageError("characteristic p = " + std::to_string(p) + " is not prime");
  const auto f = build_field(p, 1, m, !no_tables);
  const auto& ctx = *f;
  json j = {{"p", p},
            {"m", m},
            {"order", ctx.order()},
            {"modulus", ctx.modulus()},
            {"modulus_string", ctx.modulus_string()},
            {"subfields", ctx.subfield_orders()},
            {"primitive", ctx.primitive()},
            {"mode", ctx.mode() == FieldCtx::Mode::Table ? "table" : "polynomial"}};
  emit(c, out, j);
  return kExact;
}

int cmd_build(const Config& c, std::ostream& out, std::ostream& err) {
  const auto v = obtain_variety(c, err);
  if (v.basis.collapsed()) err << "warning: " << collapse_note(v) << '\n';
  progress(c, err, "variety: " + std::to_string(v.points.size()) + " x " + std::to_string(v.basis.effective_N()) +
                       ", rank " + std::to_string(v.rank));
  if (!c.csv.empty()) {
    std::ofstream f(c.csv);
    if (!f) throw UsageError("cannot write " + c.csv);
    write_csv(f, v.coords.transpose());
  }
  emit(c, out, to_json(v));
  return kExact;
}

int cmd_code(const Config& c, std::ostream& out, std::ostream& err) {
  const Code code = build_code(obtain_uncollapsed(c, err));
  progress(c, err, "code: [" + std::to_string(code.nu) + ", " + std::to_string(code.kappa) + "], d = " +
                       std::to_string(code.d()) + ", q' = " + std::to_string(code.q_prime()));
  const auto plan = plan_of(c);
  CodeReport report = min_distance(code, plan);
  for (const auto& s : report.stages)
    progress(c, err, "  " + s.stage + " w=" + std::to_string(s.subset_size) + ": " + s.outcome + " (" +
                         std::to_string(s.subsets) + " subsets)");
  if (report.delta && *report.delta == code.d() + 2) {
    try {
      classify_min_words(code, report, plan);
      progress(c, err, "  classification: " + std::to_string(report.support_count) + " supports, " +
                           std::to_string(report.support_violations) + " violations");
    } catch (const BudgetExceeded& e) {
      report.stages.push_back({"classification", code.d() + 2, "skipped: budget exceeded", 0, 0});
      progress(c, err, std::string("  classification skipped: ") + e.what());
    }
  }
  json j = to_json(report, code);
  finish(j);
  emit(c, out, j);
  if (report.delta)
    progress(c, err, "result: [" + std::to_string(report.nu) + ", " + std::to_string(report.kappa) + ", " +
                         std::to_string(*report.delta) + "] " + to_string(*report.status));
  else
    progress(c, err, "result: delta >= " + std::to_string(report.delta_lower_bound) + " (bound only)");
  if (!report.invariant_violations.empty()) {
    for (const auto& v : report.invariant_violations) err << "invariant violation: " << v << '\n';
    return kFailure;
  }
  return report.delta ? kExact : kBoundOnly;
}

int verify_general_position_cmd(const Config& c, const Code& code, json& j) {
  const std::size_t k = c.k ? c.k : code.d() + 1;
  if (k < 1 || k > code.nu)
    throw UsageError("--k = " + std::to_string(k) + " must satisfy 1 <= k <= nu = " + std::to_string(code.nu));
  const auto gp = verify_general_position(code, k, plan_of(c));
  j["k"] = k;
  j["subsets_checked"] = gp.subsets_checked;
  j["counterexample"] = gp.counterexample ? json(*gp.counterexample) : json(nullptr);
  j["pass"] = gp.holds;
  return gp.holds ? kExact : kFailure;
}

int verify_dep_classification(const Config& c, const Code& code, json& j) {
  auto plan = plan_of(c);
  const std::size_t w = code.d() + 2;
  if (w > code.redundancy() + 1) throw UsageError("d + 2 exceeds effective_N + 1; no classification possible");
  plan.w_max = w;
  CodeReport r = min_distance(code, plan);
  j["subset_size"] = w;
  j["invariant_violations"] = r.invariant_violations;
  bool pass = r.invariant_violations.empty();
  if (r.delta && *r.delta == w) {
    classify_min_words(code, r, plan);
    j["supports_classified"] = r.support_count;
    j["support_violations"] = r.support_violations;
    pass = pass && r.support_violations == 0 && r.invariant_violations.empty();
  } else if (r.delta_lower_bound >= w) {
    // Confirm over every (d+2)-subset, not just the collinear candidates.
    const auto gp = verify_general_position(code, w, plan);
    j["supports_classified"] = 0;
    j["exhaustive_subsets_checked"] = gp.subsets_checked;
    j["counterexample"] = gp.counterexample ? json(*gp.counterexample) : json(nullptr);
    pass = pass && gp.holds;
  } else {
    if (!r.delta && r.invariant_violations.empty()) {
      j["pass"] = false;
      return kBoundOnly;
    }
    pass = false;
  }
  j["pass"] = pass;
  return pass ? kExact : kFailure;
}

int verify_scroll_plucker(const Config& c, const Code& code, json& j) {
  const auto& v = code.variety;
  const ScrollFrame frame(v.n, v.sigma, v.field);
  const std::uint64_t per_point = detail::binomial(frame.dim(), v.sigma.d());
  const std::uint64_t work = per_point * v.points.size();
  if (per_point == 0 || work / per_point != v.points.size() || work > c.budget)
    throw BudgetExceeded("scroll check needs " + std::to_string(work) + " minors, budget is " +
                         std::to_string(c.budget));
  std::vector<char> ok(v.points.size(), 0);
  detail::parallel_ranges(v.points.size(), c.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) ok[i] = scroll_plucker_check(v.points[i], frame);
  });
  std::vector<std::size_t> failures;
  for (std::size_t i = 0; i < ok.size(); ++i)
    if (!ok[i]) failures.push_back(i);
  j["points_checked"] = v.points.size();
  j["minors_per_point"] = per_point;
  j["failures"] = failures;
  j["pass"] = failures.empty();
  return failures.empty() ? kExact : kFailure;
}

int verify_oracle(const Config& c, const Code& code, json& j) {
  const std::size_t w_max = c.w_max ? c.w_max : code.redundancy() + 1;
  const auto oracle = oracle_min_distance(code, w_max);
  auto plan = plan_of(c);
  plan.w_max = w_max;
  const auto staged = min_distance(code, plan);
  j["w_max"] = w_max;
  j["oracle_delta"] = oracle.delta ? json(*oracle.delta) : json(nullptr);
  j["oracle_witness"] = oracle.witness;
  j["staged_delta"] = staged.delta ? json(*staged.delta) : json(nullptr);
  j["staged_witness"] = staged.witness;
  j["invariant_violations"] = staged.invariant_violations;
  if (!staged.delta && !oracle.delta && staged.delta_lower_bound < oracle.lower_bound) {
    j["pass"] = false;
    return kBoundOnly;
  }
  const bool pass = staged.invariant_violations.empty() && oracle.delta == staged.delta;
  j["pass"] = pass;
  return pass ? kExact : kFailure;
}

int cmd_verify(const std::string& property, const Config& c, std::ostream& out, std::ostream& err) {
  const Code code = build_code(obtain_uncollapsed(c, err));
  json j = {{"property", property}, {"config", config_json(code.variety)}};
  progress(c, err, "verify " + property + " on [" + std::to_string(code.nu) + ", " + std::to_string(code.kappa) + "]");
  int status = kFailure;
  try {
    if (property == "general-position") status = verify_general_position_cmd(c, code, j);
    else if (property == "dep-classification") status = verify_dep_classification(c, code, j);
    else if (property == "scroll-plucker") status = verify_scroll_plucker(c, code, j);
    else status = verify_oracle(c, code, j);
  } catch (const BudgetExceeded& e) {
    j["pass"] = false;
    j["budget_exceeded"] = e.what();
    status = kBoundOnly;
  }
  emit(c, out, j);
  progress(c, err, std::string(status == kExact ? "pass" : status == kBoundOnly ? "inconclusive (budget)" : "FAIL"));
  return status;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Twisted Veronese varieties over finite fields and their codes", "veronese"};
  app.require_subcommand(1);

  std::uint32_t field_p = 0, field_m = 0;
  bool field_no_tables = false;
  std::string field_output;
  auto* field = app.add_subcommand("field", "print the field GF(p^m), its modulus and subfields");
  field->add_option("--p", field_p, "characteristic")->required();
  field->add_option("--m", field_m, "extension degree")->required();
  field->add_flag("--no-tables", field_no_tables, "polynomial-mode arithmetic");
  field->add_option("--output,-o", field_output, "report file (default: stdout)");

  Flags build_flags, code_flags, verify_flags;
  auto* build = app.add_subcommand("build", "embed PG(n-1, q^t) and write the variety matrix as JSON");
  add_config_flags(build, build_flags);
  build_flags.opt["csv"] = build->add_option("--csv", build_flags.csv, "also write H (effective_N x nu) as CSV");

  auto* code = app.add_subcommand("code", "exact minimum distance of the code C_{d,sigma}");
  add_config_flags(code, code_flags);
  add_search_flags(code, code_flags);

  std::string property;
  auto* verify = app.add_subcommand("verify", "run one exhaustive structural check");
  verify->add_option("property", property, "general-position | dep-classification | scroll-plucker | oracle-equivalence")
      ->required()
      ->check(CLI::IsMember({"general-position", "dep-classification", "scroll-plucker", "oracle-equivalence"}));
  add_config_flags(verify, verify_flags);
  add_search_flags(verify, verify_flags);
  verify_flags.opt["k"] = verify->add_option("--k", verify_flags.k, "subset size for general-position (default d+1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExact : kFailure;
  }

  try {
    if (field->parsed()) {
      Config c;
      c.output = field_output;
      return cmd_field(field_p, field_m, field_no_tables, c, out);
    }
    if (build->parsed()) return cmd_build(resolve(build_flags), out, err);
    if (code->parsed()) return cmd_code(resolve(code_flags), out, err);
    return cmd_verify(property, resolve(verify_flags), out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace veronese::cli
