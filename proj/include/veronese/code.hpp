#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "veronese/linalg.hpp"
#include "veronese/pg.hpp"
#include "veronese/variety.hpp"

namespace veronese {

// Thrown when an exhaustive check would examine more subsets than allowed.
class BudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The code whose parity-check matrix has the embedded points as columns.
struct Code {
  VarietyMatrix variety;
  Matrix H;  // effective_N x nu, column j = embedding of variety.points[j]
  std::size_t nu = 0;
  std::size_t kappa = 0;

  std::size_t d() const { return variety.sigma.d(); }
  std::size_t redundancy() const { return H.rows(); }
  std::uint64_t q_prime() const { return variety.sigma.fixed_subfield_order(); }
  const FieldCtx& field() const { return *variety.field; }
};

// Throws std::logic_error if the variety matrix is rank deficient.
Code build_code(VarietyMatrix v);

inline constexpr std::uint64_t kDefaultStageBudget = 2'000'000'000;
inline constexpr std::uint64_t kOracleCap = 5'000'000;

struct SearchPlan {
  std::size_t w_max = 0;  // 0 means effective_N + 1
  std::uint64_t budget = kDefaultStageBudget;  // subsets per stage
  unsigned workers = 1;
  std::size_t max_listed_supports = 10'000;
};

enum class MdsStatus { MDS, AlmostMDS, Other };
std::string to_string(MdsStatus s);

struct StageRecord {
  std::string stage;
  std::size_t subset_size = 0;
  std::string outcome;
  std::uint64_t subsets = 0;  // deterministic count of subsets examined
  double millis = 0;          // wall time, excluded from the canonical hash
};

struct SupportInfo {
  std::vector<std::size_t> columns;
  std::vector<ProjPoint> points;
  std::size_t kernel_dim = 0;
  Vec codeword;  // kernel vector restricted to the support
  bool collinear = false;
  bool on_subline = false;
  std::vector<ProjPoint> subline_frame;
};

struct CodeReport {
  std::size_t nu = 0, kappa = 0;
  std::optional<std::size_t> delta;  // set only when resolved exactly
  std::size_t delta_lower_bound = 0;
  std::size_t singleton_bound = 0;
  std::optional<MdsStatus> status;
  std::vector<std::size_t> witness;
  Vec witness_codeword;
  bool classified = false;
  std::uint64_t support_count = 0;
  std::uint64_t support_violations = 0;
  std::vector<SupportInfo> supports;
  std::vector<StageRecord> stages;
  std::vector<std::string> invariant_violations;

  bool delta_exact() const { return delta.has_value(); }
};

struct GeneralPosition {
  bool holds = true;
  std::optional<std::vector<std::size_t>> counterexample;  // lexicographically first
  std::uint64_t subsets_checked = 0;
};

// Checks every k-subset of columns for independence. Throws BudgetExceeded when
// C(nu, k) exceeds plan.budget.
GeneralPosition verify_general_position(const Code& c, std::size_t k, const SearchPlan& plan);

// Staged exact minimum-distance search:
//   1. all (d+1)-subsets independent;
//   2. dependent (d+2)-subsets among points of a line, restricted to
//      F_{q'}-sublines when q' > d;
//   3. w-subsets for w = d+3, ..., w_max in lexicographic order, first hit wins.
// A stage that would exceed plan.budget leaves delta unresolved and records the
// proven lower bound.
CodeReport min_distance(const Code& c, const SearchPlan& plan);

// Enumerates every dependent (d+2)-subset and classifies it. Requires
// report.delta == d+2.
void classify_min_words(const Code& c, CodeReport& report, const SearchPlan& plan);

// MDS iff delta = nu - kappa + 1, almost MDS iff delta = nu - kappa. Throws
// std::logic_error when delta is unresolved.
MdsStatus mds_status(const CodeReport& report);

struct OracleResult {
  std::optional<std::size_t> delta;
  std::size_t lower_bound = 0;
  std::vector<std::size_t> witness;
};

// Plain exhaustive search with fresh elimination per subset and no geometric
// pruning. Throws BudgetExceeded when sum_{w <= w_max} C(nu, w) > kOracleCap.
OracleResult oracle_min_distance(const Code& c, std::size_t w_max);

nlohmann::json to_json(const CodeReport& r, const Code& c);

// SHA-256 (hex) of the compact dump of `report` without its "timings" and
// "canonical_hash" members.
std::string canonical_hash(const nlohmann::json& report);

}  // namespace veronese
