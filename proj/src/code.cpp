#include "veronese/code.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <numeric>

#include "parallel.hpp"
#include "subset_search.hpp"

namespace veronese {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::vector<std::size_t> all_columns(const Code& c) {
  std::vector<std::size_t> u(c.nu);
  std::iota(u.begin(), u.end(), 0);
  return u;
}

std::vector<ProjPoint> points_of(const Code& c, const std::vector<std::size_t>& columns) {
  std::vector<ProjPoint> out;
  out.reserve(columns.size());
  for (auto j : columns) out.push_back(c.variety.points[j]);
  return out;
}

// Candidate universes for dependent (d+2)-subsets: the lines of PG(n-1, q^t),
// or their F_{q'}-sublines when q' > d. Each is a sorted list of column indices.
std::vector<std::vector<std::size_t>> candidate_universes(const Code& c, bool& exhaustive) {
  const auto& f = c.field();
  const std::size_t n = c.variety.n;
  std::vector<std::vector<std::size_t>> lines;
  if (n == 2) lines.push_back(all_columns(c));
  else lines = enumerate_lines(n, f);

  const std::uint64_t qp = c.q_prime();
  exhaustive = n == 2 && (qp <= c.d() || qp == f.order());
  if (qp <= c.d() || qp == f.order()) return lines;

  std::vector<std::vector<std::size_t>> out;
  for (const auto& line : lines) {
    const auto pts = points_of(c, line);
    for (const auto& sub : enumerate_sublines(pts, qp, f)) {
      std::vector<std::size_t> idx;
      idx.reserve(sub.size());
      for (const auto& p : sub) idx.push_back(static_cast<std::size_t>(point_index(p, f)));
      std::sort(idx.begin(), idx.end());
      out.push_back(std::move(idx));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_witness(const Code& c, CodeReport& r) {
  const auto sub = c.H.select_columns(r.witness);
  const auto ker = kernel_basis(sub);
  if (ker.size() != 1) {
    r.invariant_violations.push_back("minimal dependent set has kernel dimension " + std::to_string(ker.size()));
    return;
  }
  r.witness_codeword = ker.front();
  if (std::count(r.witness_codeword.begin(), r.witness_codeword.end(), Elem{0}) != 0)
    r.invariant_violations.push_back("witness codeword has a zero entry on its support");
  if (r.witness.size() == c.d() + 2 && !is_collinear(points_of(c, r.witness), c.field()))
    r.invariant_violations.push_back("dependent (d+2)-set with non-collinear pre-images");
}

}  // namespace

std::string to_string(MdsStatus s) {
  switch (s) {
    case MdsStatus::MDS: return "MDS";
    case MdsStatus::AlmostMDS: return "almost-MDS";
    case MdsStatus::Other: return "other";
  }
  return "other";
}

Code build_code(VarietyMatrix v) {
  const std::size_t N = v.basis.effective_N();
  if (v.rank != N)
    throw std::logic_error("parity-check matrix has rank " + std::to_string(v.rank) + " < effective_N = " +
                           std::to_string(N));
  Code c{std::move(v), {}, 0, 0};
  c.H = c.variety.coords.transpose();
  c.nu = c.H.cols();
  c.kappa = c.nu - N;
  return c;
}

GeneralPosition verify_general_position(const Code& c, std::size_t k, const SearchPlan& plan) {
  const std::uint64_t total = detail::binomial(c.nu, k);
  if (total > plan.budget)
    throw BudgetExceeded("general-position check needs C(" + std::to_string(c.nu) + ", " + std::to_string(k) +
                         ") = " + std::to_string(total) + " subsets, budget is " + std::to_string(plan.budget));
  const ColumnStore cols(c.H);
  const auto u = all_columns(c);
  const auto r = detail::first_dependent(cols, c.field(), u, k, plan.workers, plan.budget);
  GeneralPosition out;
  out.holds = !r.subset.has_value();
  out.counterexample = r.subset;
  out.subsets_checked = r.examined;
  return out;
}

CodeReport min_distance(const Code& c, const SearchPlan& plan) {
  const std::size_t N = c.redundancy();
  const std::size_t d = c.d();
  if (c.kappa == 0) throw std::invalid_argument("the code has dimension 0; minimum distance is undefined");
  const std::size_t w_max = plan.w_max == 0 ? N + 1 : plan.w_max;
  if (w_max > N + 1)
    throw std::invalid_argument("w_max = " + std::to_string(w_max) + " exceeds effective_N + 1 = " +
                                std::to_string(N + 1));

  CodeReport r;
  r.nu = c.nu;
  r.kappa = c.kappa;
  r.singleton_bound = c.nu - c.kappa + 1;
  // Columns are nonzero and pairwise non-proportional (injectivity).
  r.delta_lower_bound = 3;

  const ColumnStore cols(c.H);
  const auto& f = c.field();
  const auto everything = all_columns(c);

  auto resolve = [&](std::vector<std::size_t> witness) {
    r.delta = witness.size();
    r.delta_lower_bound = witness.size();
    r.witness = std::move(witness);
    r.status = mds_status(r);
    check_witness(c, r);
  };

  // Stage 1.
  const std::size_t k1 = std::min(d + 1, N);
  if (k1 >= 3) {
    const auto t0 = Clock::now();
    const std::uint64_t total = detail::binomial(c.nu, k1);
    if (total > plan.budget) {
      r.stages.push_back({"general-position", k1, "budget exceeded", 0, elapsed_ms(t0)});
      return r;
    }
    const auto res = detail::first_dependent(cols, f, everything, k1, plan.workers, plan.budget);
    if (res.subset) {
      r.stages.push_back({"general-position", k1, "dependent subset found", res.examined, elapsed_ms(t0)});
      r.invariant_violations.push_back("found " + std::to_string(k1) + " dependent points; expected any d+1 independent");
      for (std::size_t w = 3; w <= k1; ++w) {
        const auto t = Clock::now();
        const auto sw = detail::first_dependent(cols, f, everything, w, plan.workers, plan.budget);
        r.stages.push_back({"fallback", w, sw.subset ? "dependent" : "independent", sw.examined, elapsed_ms(t)});
        if (sw.subset) {
          resolve(*sw.subset);
          return r;
        }
        r.delta_lower_bound = w + 1;
      }
      return r;
    }
    r.stages.push_back({"general-position", k1, "all independent", res.examined, elapsed_ms(t0)});
  }
  r.delta_lower_bound = std::max<std::size_t>(r.delta_lower_bound, k1 + 1);
  if (k1 < d + 1) {
    // Fewer rows than d+1: any N+1 columns are dependent.
    const auto res = detail::first_dependent(cols, f, everything, N + 1, plan.workers, plan.budget);
    if (res.subset) resolve(*res.subset);
    return r;
  }

  // Stage 2.
  const std::size_t w2 = d + 2;
  if (w2 > w_max) return r;
  {
    const auto t0 = Clock::now();
    bool exhaustive = false;
    const auto universes = candidate_universes(c, exhaustive);
    std::uint64_t total = 0;
    for (const auto& u : universes) total += detail::binomial(u.size(), w2);
    if (total > plan.budget) {
      r.stages.push_back({"collinear-candidates", w2, "budget exceeded", 0, elapsed_ms(t0)});
      return r;
    }
    std::optional<std::vector<std::size_t>> best;
    std::uint64_t examined = 0;
    if (universes.size() == 1) {
      const auto res = detail::first_dependent(cols, f, universes.front(), w2, plan.workers, plan.budget);
      best = res.subset;
      examined = res.examined;
    } else {
      std::vector<detail::FirstDependent> results(universes.size());
      std::atomic<std::size_t> next{0};
      detail::run_workers(plan.workers, [&](unsigned) {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= universes.size()) break;
          results[i] = detail::first_dependent(cols, f, universes[i], w2, 1, plan.budget);
        }
      });
      for (const auto& res : results) {
        examined += res.examined;
        if (res.subset && (!best || *res.subset < *best)) best = res.subset;
      }
    }
    const std::string scope = c.q_prime() > d && c.q_prime() < f.order() ? "sublines" : "lines";
    if (best) {
      r.stages.push_back({"collinear-candidates", w2, "dependent subset on " + scope, examined, elapsed_ms(t0)});
      resolve(*best);
      return r;
    }
    r.stages.push_back({"collinear-candidates", w2,
                        exhaustive ? "none (exhaustive)" : "none among " + std::to_string(universes.size()) + " " + scope,
                        examined, elapsed_ms(t0)});
    r.delta_lower_bound = w2 + 1;
  }

  // Stage 3.
  for (std::size_t w = d + 3; w <= w_max; ++w) {
    const auto t0 = Clock::now();
    const auto res = detail::first_dependent(cols, f, everything, w, plan.workers, plan.budget);
    if (res.subset) {
      r.stages.push_back({"lexicographic-search", w, "dependent subset found", res.examined, elapsed_ms(t0)});
      if (res.dependent_prefix < w)
        r.invariant_violations.push_back("stage 3 met a dependent subset of size " +
                                         std::to_string(res.dependent_prefix) + " missed by stage 2");
      resolve(*res.subset);
      return r;
    }
    if (res.budget_cut) {
      r.stages.push_back({"lexicographic-search", w, "budget exceeded", res.examined, elapsed_ms(t0)});
      return r;
    }
    r.stages.push_back({"lexicographic-search", w, "all independent", res.examined, elapsed_ms(t0)});
    r.delta_lower_bound = w + 1;
  }
  return r;
}

void classify_min_words(const Code& c, CodeReport& report, const SearchPlan& plan) {
  const std::size_t w = c.d() + 2;
  if (!report.delta || *report.delta != w)
    throw std::logic_error("classify_min_words requires delta = d+2 = " + std::to_string(w));
  const std::uint64_t total = detail::binomial(c.nu, w);
  if (total > plan.budget)
    throw BudgetExceeded("classification needs C(" + std::to_string(c.nu) + ", " + std::to_string(w) +
                         ") = " + std::to_string(total) + " subsets, budget is " + std::to_string(plan.budget));
  const auto t0 = Clock::now();
  const ColumnStore cols(c.H);
  const auto& f = c.field();
  const auto everything = all_columns(c);
  const auto subsets = detail::all_dependent(cols, f, everything, w, plan.workers);

  std::vector<SupportInfo> infos(subsets.size());
  detail::parallel_ranges(subsets.size(), plan.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& info = infos[i];
      info.columns = subsets[i];
      info.points = points_of(c, info.columns);
      const auto ker = kernel_basis(c.H.select_columns(info.columns));
      info.kernel_dim = ker.size();
      if (!ker.empty()) info.codeword = ker.front();
      info.collinear = is_collinear(info.points, f);
      if (info.collinear) {
        info.on_subline = on_common_subline(info.points, c.q_prime(), f);
        info.subline_frame.assign(info.points.begin(), info.points.begin() + 3);
      }
    }
  });

  report.classified = true;
  report.support_count = infos.size();
  report.support_violations = 0;
  for (const auto& info : infos)
    if (info.kernel_dim != 1 || !info.collinear || !info.on_subline) ++report.support_violations;
  if (report.support_violations)
    report.invariant_violations.push_back(std::to_string(report.support_violations) +
                                          " minimum-weight supports are not d+2 points of a subline");
  if (infos.size() > plan.max_listed_supports) infos.resize(plan.max_listed_supports);
  report.supports = std::move(infos);
  report.stages.push_back({"classification", w, std::to_string(report.support_count) + " supports", total,
                           elapsed_ms(t0)});
}

MdsStatus mds_status(const CodeReport& report) {
  if (!report.delta) throw std::logic_error("mds_status: minimum distance is unresolved");
  const std::size_t delta = *report.delta;
  if (delta == report.nu - report.kappa + 1) return MdsStatus::MDS;
  if (delta == report.nu - report.kappa) return MdsStatus::AlmostMDS;
  return MdsStatus::Other;
}

OracleResult oracle_min_distance(const Code& c, std::size_t w_max) {
  std::uint64_t total = 0;
  for (std::size_t w = 1; w <= w_max; ++w) total += detail::binomial(c.nu, w);
  if (total > kOracleCap)
    throw BudgetExceeded("oracle would examine " + std::to_string(total) + " subsets (cap " +
                         std::to_string(kOracleCap) + ")");
  OracleResult out;
  for (std::size_t w = 1; w <= std::min(w_max, c.nu); ++w) {
    std::vector<std::size_t> s(w);
    std::iota(s.begin(), s.end(), 0);
    while (true) {
      if (rank(c.H.select_columns(s)) < w) {
        out.delta = w;
        out.lower_bound = w;
        out.witness = s;
        return out;
      }
      std::size_t i = w;
      while (i > 0 && s[i - 1] == c.nu - w + (i - 1)) --i;
      if (i == 0) break;
      ++s[i - 1];
      for (std::size_t j = i; j < w; ++j) s[j] = s[j - 1] + 1;
    }
  }
  out.lower_bound = w_max + 1;
  return out;
}

nlohmann::json to_json(const CodeReport& r, const Code& c) {
  using nlohmann::json;
  const auto& v = c.variety;
  json supports = json::array();
  for (const auto& s : r.supports) {
    json frame = s.subline_frame.empty() ? json(nullptr) : points_to_json(s.subline_frame);
    supports.push_back({{"columns", s.columns},
                        {"points", points_to_json(s.points)},
                        {"kernel_dim", s.kernel_dim},
                        {"codeword", s.codeword},
                        {"collinear", s.collinear},
                        {"q_prime", c.q_prime()},
                        {"subline_frame", frame},
                        {"on_subline", s.on_subline}});
  }
  json stages = json::array();
  json stage_ms = json::array();
  for (const auto& s : r.stages) {
    stages.push_back({{"stage", s.stage}, {"subset_size", s.subset_size}, {"outcome", s.outcome},
                      {"subsets", s.subsets}});
    stage_ms.push_back({{"stage", s.stage}, {"subset_size", s.subset_size}, {"ms", s.millis}});
  }
  json out = {{"field", field_to_json(*v.field)},
              {"n", v.n},
              {"sigma_exponents", v.sigma.exponents()},
              {"d", v.sigma.d()},
              {"sigma_norm", v.sigma.norm()},
              {"q_prime", v.sigma.fixed_subfield_order()},
              {"expected_N", v.basis.expected_N},
              {"effective_N", v.basis.effective_N()},
              {"nu", r.nu},
              {"kappa", r.kappa},
              {"delta", r.delta ? json(*r.delta) : json(nullptr)},
              {"delta_exact", r.delta_exact()},
              {"delta_lower_bound", r.delta_lower_bound},
              {"singleton_bound", r.singleton_bound},
              {"status", r.status ? to_string(*r.status) : std::string("unresolved")},
              {"witness", r.witness},
              {"witness_points", points_to_json(points_of(c, r.witness))},
              {"witness_codeword", r.witness_codeword},
              {"min_weight_support_count", r.classified ? json(r.support_count) : json(nullptr)},
              {"support_violations", r.support_violations},
              {"supports_listed", r.supports.size()},
              {"supports", supports},
              {"invariant_violations", r.invariant_violations},
              {"stage_log", stages},
              {"timings", {{"stages", stage_ms}}}};
  return out;
}

std::string canonical_hash(const nlohmann::json& report) {
  auto copy = report;
  copy.erase("timings");
  copy.erase("canonical_hash");
  const std::string text = copy.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace veronese
