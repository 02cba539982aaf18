#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "subset_search.hpp"
#include "veronese/code.hpp"

using namespace veronese;

namespace {

Code make_code(std::uint32_t p, std::uint32_t m, std::size_t n, std::vector<std::uint32_t> s, unsigned workers = 1) {
  auto f = build_field(p, m);
  return build_code(build_variety(n, SigmaVector(std::move(s), *f), f, workers));
}

SearchPlan plan(unsigned workers = 1) {
  SearchPlan sp;
  sp.workers = workers;
  return sp;
}

// Every (size-1)-subset of the witness independent, the witness itself dependent.
void check_minimal(const Code& c, const std::vector<std::size_t>& w) {
  CHECK_FALSE(is_independent(c.H, w));
  for (std::size_t drop = 0; drop < w.size(); ++drop) {
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (i != drop) sub.push_back(w[i]);
    CHECK(is_independent(c.H, sub));
  }
  CHECK(kernel_basis(c.H.select_columns(w)).size() == 1);
}

}  // namespace

TEST_CASE("subset ranks and binomials") {
  CHECK(detail::binomial(28, 4) == 20475);
  CHECK(detail::binomial(28, 5) == 98280);
  CHECK(detail::binomial(33, 4) == 40920);
  CHECK(detail::binomial(3, 5) == 0);
  CHECK(detail::binomial(200, 100) == UINT64_MAX);
  std::vector<std::size_t> s = {0, 1, 2};
  std::uint64_t expect = 0;
  do {
    CHECK(detail::subset_rank(s, 7) == expect++);
    std::size_t i = 3;
    while (i > 0 && s[i - 1] == 7 - 3 + i - 1) --i;
    if (i == 0) break;
    ++s[i - 1];
    for (std::size_t j = i; j < 3; ++j) s[j] = s[j - 1] + 1;
  } while (true);
  CHECK(expect == 35);
}

TEST_CASE("first dependent subset matches plain enumeration") {
  std::mt19937_64 rng(8);
  auto f = build_field(3, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const auto M = oracle::random_matrix(f, 4, 9, rng, 0.4);
    const ColumnStore cols(M);
    std::vector<std::size_t> u(9);
    std::iota(u.begin(), u.end(), 0);
    for (std::size_t k = 1; k <= 5; ++k) {
      std::optional<std::vector<std::size_t>> first;
      std::uint64_t rank_of_first = 0, count = 0;
      std::vector<std::vector<std::size_t>> all;
      std::vector<std::size_t> s(k);
      std::iota(s.begin(), s.end(), 0);
      while (true) {
        if (oracle::rank(M.select_columns(s)) < k) {
          if (!first) {
            first = s;
            rank_of_first = count;
          }
          all.push_back(s);
        }
        ++count;
        std::size_t i = k;
        while (i > 0 && s[i - 1] == 9 - k + i - 1) --i;
        if (i == 0) break;
        ++s[i - 1];
        for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
      }
      for (unsigned w : {1u, 3u}) {
        const auto r = detail::first_dependent(cols, *f, u, k, w, UINT64_MAX);
        CHECK(r.subset == first);
        CHECK(r.examined == (first ? rank_of_first + 1 : count));
        CHECK(detail::all_dependent(cols, *f, u, k, w) == all);
        if (first && rank_of_first > 0) {
          const auto cut = detail::first_dependent(cols, *f, u, k, w, rank_of_first);
          CHECK(cut.budget_cut);
          CHECK_FALSE(cut.subset);
        }
      }
    }
  }
}

TEST_CASE("code parameters") {
  const auto a = make_code(3, 3, 2, {0, 0, 2});
  CHECK(a.nu == 28);
  CHECK(a.kappa == 22);
  CHECK(a.H.rows() == 6);
  CHECK(a.H == a.variety.coords.transpose());
  const auto b = make_code(5, 1, 2, {0, 0});
  CHECK(b.nu == 6);
  CHECK(b.kappa == 3);
  const auto c = make_code(2, 2, 3, {0, 0});
  CHECK(c.nu == 21);
  CHECK(c.kappa == 15);
}

TEST_CASE("general position") {
  const auto track = make_code(3, 3, 2, {0, 0, 2});
  const auto gp = verify_general_position(track, 4, plan(2));
  CHECK(gp.holds);
  CHECK(gp.subsets_checked == 20475);
  CHECK(verify_general_position(track, 2, plan()).holds);

  const auto conic = make_code(5, 1, 2, {0, 0});
  const auto four = verify_general_position(conic, 4, plan());
  CHECK_FALSE(four.holds);
  REQUIRE(four.counterexample);
  CHECK(*four.counterexample == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(four.subsets_checked == 1);

  SearchPlan tight = plan();
  tight.budget = 100;
  CHECK_THROWS_AS(verify_general_position(track, 4, tight), BudgetExceeded);
}

TEST_CASE("minimum distance examples") {
  const auto track = make_code(3, 3, 2, {0, 0, 2});
  const auto r = min_distance(track, plan());
  REQUIRE(r.delta);
  CHECK(*r.delta == 6);
  CHECK(r.singleton_bound == 7);
  CHECK(r.status == MdsStatus::AlmostMDS);
  CHECK(r.invariant_violations.empty());
  CHECK(r.witness.size() == 6);
  check_minimal(track, r.witness);
  CHECK(track.H.apply(std::vector<Elem>(28, 0)) == Vec(6, 0));

  const auto nrc = min_distance(make_code(3, 3, 2, {0, 0, 1}), plan());
  REQUIRE(nrc.delta);
  CHECK(*nrc.delta == 7);
  CHECK(nrc.status == MdsStatus::MDS);

  const auto conic = min_distance(make_code(5, 1, 2, {0, 0}), plan());
  REQUIRE(conic.delta);
  CHECK(*conic.delta == 4);
  CHECK(conic.status == MdsStatus::MDS);
}

TEST_CASE("witness codeword lies in the code") {
  const auto c = make_code(2, 4, 2, {0, 2});
  const auto r = min_distance(c, plan());
  REQUIRE(r.delta);
  Vec word(c.nu, 0);
  for (std::size_t i = 0; i < r.witness.size(); ++i) word[r.witness[i]] = r.witness_codeword[i];
  CHECK(c.H.apply(word) == Vec(c.H.rows(), 0));
  CHECK(std::count(word.begin(), word.end(), Elem{0}) == static_cast<long>(c.nu - *r.delta));
}

TEST_CASE("classification of minimum-weight supports") {
  const auto c = make_code(2, 4, 2, {0, 2});
  auto r = min_distance(c, plan());
  REQUIRE(r.delta == 4u);
  classify_min_words(c, r, plan(3));
  CHECK(r.support_count == 340);
  CHECK(r.support_violations == 0);
  for (const auto& s : r.supports) {
    CHECK(s.kernel_dim == 1);
    CHECK(s.on_subline);
    CHECK(s.subline_frame.size() == 3);
  }

  const auto conic = make_code(5, 1, 2, {0, 0});
  auto rc = min_distance(conic, plan());
  classify_min_words(conic, rc, plan());
  CHECK(rc.support_count == 15);
  CHECK(rc.support_violations == 0);

  const auto surface = make_code(2, 2, 3, {0, 0});
  auto rs = min_distance(surface, plan());
  REQUIRE(rs.delta == 4u);
  classify_min_words(surface, rs, plan());
  // Any 4 of the 5 points on each of the 21 lines.
  CHECK(rs.support_count == 105);
  for (const auto& s : rs.supports) CHECK(s.collinear);

  auto nrc = min_distance(make_code(3, 3, 2, {0, 0, 1}), plan());
  CHECK_THROWS_AS(classify_min_words(make_code(3, 3, 2, {0, 0, 1}), nrc, plan()), std::logic_error);
}

TEST_CASE("mds status") {
  CodeReport r;
  r.nu = 28;
  r.kappa = 22;
  CHECK_THROWS_AS(mds_status(r), std::logic_error);
  r.delta = 7;
  CHECK(mds_status(r) == MdsStatus::MDS);
  r.delta = 6;
  CHECK(mds_status(r) == MdsStatus::AlmostMDS);
  r.delta = 5;
  CHECK(mds_status(r) == MdsStatus::Other);
  r.nu = 6;
  r.kappa = 3;
  r.delta = 4;
  CHECK(mds_status(r) == MdsStatus::MDS);
  CHECK(to_string(MdsStatus::AlmostMDS) == "almost-MDS");
}

TEST_CASE("oracle minimum distance") {
  const auto nrc3 = make_code(2, 2, 2, {0, 1});
  const auto o = oracle_min_distance(nrc3, 5);
  CHECK(o.delta == 5u);
  CHECK(nrc3.kappa == 1);
  CHECK(min_distance(nrc3, plan()).delta == 5u);

  for (auto [p, m, s] : std::vector<std::tuple<std::uint32_t, std::uint32_t, std::vector<std::uint32_t>>>{
           {5, 1, {0, 0}}, {2, 3, {0, 1}}, {3, 2, {0, 1}}, {7, 1, {0, 0}}, {2, 3, {0, 2}}, {2, 4, {0, 2}}}) {
    const auto c = make_code(p, m, 2, s);
    const auto staged = min_distance(c, plan());
    const auto brute = oracle_min_distance(c, c.redundancy() + 1);
    CHECK(staged.delta == brute.delta);
    CHECK(staged.witness == brute.witness);
  }
  CHECK_THROWS_AS(oracle_min_distance(make_code(3, 4, 2, {0, 0, 3}), 7), BudgetExceeded);
}

TEST_CASE("budget caps leave delta unresolved") {
  const auto track = make_code(3, 3, 2, {0, 0, 2});
  SearchPlan sp = plan();
  sp.budget = 50'000;  // below C(28, 5)
  const auto r = min_distance(track, sp);
  CHECK_FALSE(r.delta);
  CHECK_FALSE(r.status);
  CHECK(r.delta_lower_bound == 5);
  CHECK_FALSE(to_json(r, track).at("delta_exact").get<bool>());

  sp = plan();
  sp.w_max = 5;
  const auto capped = min_distance(track, sp);
  CHECK_FALSE(capped.delta);
  CHECK(capped.delta_lower_bound == 6);
  sp.w_max = 8;
  CHECK_THROWS_AS(min_distance(track, sp), std::invalid_argument);
}

TEST_CASE("delta = d + 2 below q' and delta >= d + 3 otherwise") {
  struct Cfg {
    std::uint32_t p, m;
    std::size_t n;
    std::vector<std::uint32_t> s;
  };
  const std::vector<Cfg> configs = {
      {2, 2, 2, {0, 1}}, {2, 3, 2, {0, 1}}, {2, 3, 2, {0, 2}}, {2, 4, 2, {0, 2}}, {2, 4, 2, {0, 1}},
      {3, 2, 2, {0, 1}}, {3, 3, 2, {0, 0, 2}}, {5, 1, 2, {0, 0}}, {7, 1, 2, {0, 0}}, {2, 2, 3, {0, 0}},
      {3, 1, 3, {0, 0}}, {5, 1, 2, {0, 0, 0}}, {2, 5, 2, {0, 2}}, {2, 6, 2, {0, 2}}, {3, 2, 2, {0, 0}}};
  for (const auto& cfg : configs) {
    const auto c = make_code(cfg.p, cfg.m, cfg.n, cfg.s);
    CAPTURE(cfg.p);
    CAPTURE(cfg.m);
    CAPTURE(cfg.n);
    auto r = min_distance(c, plan(2));
    CHECK(r.invariant_violations.empty());
    REQUIRE(r.delta);
    CHECK(*r.delta <= r.singleton_bound);
    check_minimal(c, r.witness);
    if (c.d() < c.q_prime()) {
      CHECK(*r.delta == c.d() + 2);
      classify_min_words(c, r, plan(2));
      CHECK(r.support_violations == 0);
    } else {
      CHECK(*r.delta >= c.d() + 3);
      if (detail::binomial(c.nu, c.d() + 2) < 2'000'000)
        CHECK(verify_general_position(c, c.d() + 2, plan(2)).holds);
    }
  }
}

TEST_CASE("reports do not depend on the worker count") {
  for (auto [p, m, s] : std::vector<std::tuple<std::uint32_t, std::uint32_t, std::vector<std::uint32_t>>>{
           {3, 3, {0, 0, 2}}, {2, 4, {0, 2}}, {2, 5, {0, 2}}}) {
    std::string reference;
    for (unsigned w : {1u, 2u, 4u, 8u}) {
      const auto c = make_code(p, m, 2, s, w);
      auto r = min_distance(c, plan(w));
      if (r.delta == c.d() + 2) classify_min_words(c, r, plan(w));
      auto j = to_json(r, c);
      const auto hash = canonical_hash(j);
      j.erase("timings");
      const auto text = j.dump() + hash;
      if (reference.empty()) reference = text;
      CHECK(text == reference);
    }
  }
}

TEST_CASE("canonical hash ignores timings") {
  const auto c = make_code(5, 1, 2, {0, 0});
  auto j = to_json(min_distance(c, plan()), c);
  const auto h = canonical_hash(j);
  CHECK(h.size() == 64);
  j["timings"]["generated_at"] = "2000-01-01T00:00:00Z";
  j["canonical_hash"] = "x";
  CHECK(canonical_hash(j) == h);
  j["nu"] = 7;
  CHECK(canonical_hash(j) != h);
}

TEST_CASE("report json layout") {
  const auto c = make_code(2, 4, 2, {0, 2});
  auto r = min_distance(c, plan());
  classify_min_words(c, r, plan());
  const auto j = to_json(r, c);
  for (const char* key : {"nu", "kappa", "delta", "delta_exact", "singleton_bound", "status", "witness",
                          "min_weight_support_count", "supports", "timings", "stage_log"})
    CHECK(j.contains(key));
  CHECK(j.at("status") == "almost-MDS");
  CHECK(j.at("min_weight_support_count") == 340);
  CHECK(j.at("supports").size() == 340);
  const auto& s0 = j.at("supports")[0];
  CHECK(s0.at("columns").size() == 4);
  CHECK(s0.at("points").size() == 4);
  CHECK(s0.at("on_subline") == true);
  CHECK(s0.at("q_prime") == 4);
}
