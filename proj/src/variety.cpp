#include "veronese/variety.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "parallel.hpp"

namespace veronese {
namespace {

std::uint64_t ipow(std::uint64_t b, std::uint64_t k) {
  std::uint64_t r = 1;
  while (k--) r *= b;
  return r;
}

// Exponent vectors of length n and total degree `degree`, lexicographically descending.
void compositions(std::size_t n, std::uint32_t degree, Exponent& cur, std::size_t pos,
                  std::vector<Exponent>& out) {
  if (pos + 1 == n) {
    cur[pos] = degree;
    out.push_back(cur);
    return;
  }
  for (std::uint32_t a = degree + 1; a-- > 0;) {
    cur[pos] = a;
    compositions(n, degree - a, cur, pos + 1, out);
  }
}

}  // namespace

SigmaVector::SigmaVector(std::vector<std::uint32_t> exponents, const FieldCtx& f)
    : exps_(std::move(exponents)), p_(f.p()), m_(f.m()) {
  if (exps_.empty()) throw SigmaError("sigma must have at least one entry (d >= 1)");
  for (auto s : exps_)
    if (s >= m_)
      throw SigmaError("sigma exponent s = " + std::to_string(s) + " must satisfy 0 <= s < m = " +
                       std::to_string(m_) + " (x -> x^{p^s} on GF(p^m))");
  std::sort(exps_.begin(), exps_.end());
  if (exps_.front() != 0)
    throw SigmaError("sigma must contain the identity automorphism (s_0 = 0); got smallest exponent " +
                     std::to_string(exps_.front()));
  for (auto s : exps_) {
    if (distinct_.empty() || distinct_.back() != s) {
      distinct_.push_back(s);
      mult_.push_back(0);
    }
    ++mult_.back();
    norm_ += ipow(p_, s);
  }
  if (norm_ >= f.order())
    throw NormBoundError("sigma norm |sigma| = " + std::to_string(norm_) + " must be < q^t = " +
                         std::to_string(f.order()) +
                         " (standing norm assumption: distinct monomials must be distinct functions)");
  std::uint32_t g = m_;
  for (auto s : exps_)
    if (s != 0) g = std::gcd(g, s);
  qprime_ = ipow(p_, g);
}

SigmaVector SigmaVector::from_q_powers(const std::vector<std::uint32_t>& h, const FieldCtx& f) {
  std::vector<std::uint32_t> s;
  s.reserve(h.size());
  for (auto x : h) {
    if (x >= f.t())
      throw SigmaError("sigma q-exponent h = " + std::to_string(x) + " must satisfy 0 <= h < t = " +
                       std::to_string(f.t()));
    s.push_back(x * f.e());
  }
  return SigmaVector(std::move(s), f);
}

bool SigmaVector::digit_separated() const {
  std::uint64_t running = 0;
  for (std::size_t j = 0; j + 1 < distinct_.size(); ++j) {
    running += mult_[j] * ipow(p_, distinct_[j]);
    if (running >= ipow(p_, distinct_[j + 1])) return false;
  }
  return true;
}

std::size_t MonomialBasis::index_of(const Exponent& e) const {
  auto it = lookup.find(e);
  if (it == lookup.end()) throw std::out_of_range("exponent vector is not a basis monomial");
  return it->second;
}

MonomialBasis monomial_basis(std::size_t n, const SigmaVector& sigma) {
  if (n < 2) throw std::invalid_argument("monomial_basis requires n >= 2");
  MonomialBasis b;
  b.n = n;
  b.expected_N = 1;
  for (auto dj : sigma.multiplicities()) {
    std::vector<Exponent> comps;
    Exponent cur(n, 0);
    compositions(n, static_cast<std::uint32_t>(dj), cur, 0, comps);
    b.expected_N *= comps.size();
    b.factor_monomials.push_back(std::move(comps));
  }

  const std::size_t k = b.factor_monomials.size();
  std::vector<std::uint64_t> weight(k);
  for (std::size_t j = 0; j < k; ++j) weight[j] = ipow(sigma.p(), sigma.distinct()[j]);

  std::vector<Exponent> totals;
  totals.reserve(b.expected_N);
  std::vector<std::size_t> digit(k, 0);
  for (std::uint64_t code = 0; code < b.expected_N; ++code) {
    Exponent e(n, 0);
    for (std::size_t j = 0; j < k; ++j) {
      const auto& part = b.factor_monomials[j][digit[j]];
      for (std::size_t i = 0; i < n; ++i) e[i] += static_cast<std::uint32_t>(weight[j] * part[i]);
    }
    totals.push_back(std::move(e));
    for (std::size_t j = k; j-- > 0;) {
      if (++digit[j] < b.factor_monomials[j].size()) break;
      digit[j] = 0;
    }
  }

  std::set<Exponent, std::greater<>> distinct(totals.begin(), totals.end());
  b.monomials.assign(distinct.begin(), distinct.end());
  for (std::size_t i = 0; i < b.monomials.size(); ++i) b.lookup.emplace(b.monomials[i], i);
  b.origin_map.reserve(totals.size());
  for (const auto& e : totals) b.origin_map.push_back(b.lookup.at(e));
  return b;
}

Vec embed_point(const ProjPoint& p, const MonomialBasis& basis, const FieldCtx& f) {
  if (p.dim() != basis.n) throw std::invalid_argument("point dimension does not match the basis");
  Vec out(basis.monomials.size());
  for (std::size_t i = 0; i < basis.monomials.size(); ++i) {
    const auto& e = basis.monomials[i];
    Elem v = 1;
    for (std::size_t k = 0; k < basis.n && v != 0; ++k) v = f.mul(v, f.pow(p.coords[k], e[k]));
    out[i] = v;
  }
  return out;
}

void check_injective(const VarietyMatrix& v) {
  std::set<std::vector<Elem>> seen;
  const auto& f = *v.field;
  for (std::size_t r = 0; r < v.coords.rows(); ++r) {
    auto norm = normalize(v.coords.row(r), f);
    if (!seen.insert(std::move(norm.coords)).second)
      throw std::logic_error("embedding is not injective: row " + std::to_string(r) +
                             " is proportional to an earlier row");
  }
}

VarietyMatrix build_variety(std::size_t n, const SigmaVector& sigma, FieldPtr field, unsigned workers) {
  const auto& f = *field;
  if (sigma.p() != f.p() || sigma.m() != f.m())
    throw SigmaError("sigma was validated against a different field");
  auto basis = monomial_basis(n, sigma);
  const std::uint64_t count = point_count(n, f.order());
  if (count * basis.effective_N() > kMaxVarietyEntries)
    throw std::length_error("variety size " + std::to_string(count) + " x " +
                            std::to_string(basis.effective_N()) + " exceeds the supported bound");
  auto points = enum_points(n, f);
  Matrix coords(field, points.size(), basis.effective_N());
  detail::parallel_ranges(points.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = embed_point(points[i], basis, f);
      for (std::size_t c = 0; c < row.size(); ++c) coords(i, c) = row[c];
    }
  });
  VarietyMatrix v{field, n, sigma, std::move(basis), std::move(points), std::move(coords), 0};
  v.rank = rank(v.coords);
  check_injective(v);
  return v;
}

nlohmann::json field_to_json(const FieldCtx& f) {
  return {{"p", f.p()}, {"e", f.e()}, {"t", f.t()}, {"modulus", f.modulus()}};
}

FieldPtr field_from_json(const nlohmann::json& j) {
  auto f = build_field(j.at("p").get<std::uint32_t>(), j.at("e").get<std::uint32_t>(),
                       j.at("t").get<std::uint32_t>());
  if (j.contains("modulus") && j.at("modulus").get<std::vector<std::uint32_t>>() != f->modulus())
    throw std::invalid_argument("field JSON: modulus does not match the canonical modulus " +
                                f->modulus_string());
  return f;
}

nlohmann::json to_json(const VarietyMatrix& v) {
  nlohmann::json coords = nlohmann::json::array();
  for (std::size_t r = 0; r < v.coords.rows(); ++r) {
    auto row = v.coords.row(r);
    coords.push_back(std::vector<Elem>(row.begin(), row.end()));
  }
  return {{"field", field_to_json(*v.field)},
          {"n", v.n},
          {"sigma_exponents", v.sigma.exponents()},
          {"sigma_norm", v.sigma.norm()},
          {"q_prime", v.sigma.fixed_subfield_order()},
          {"expected_N", v.basis.expected_N},
          {"effective_N", v.basis.effective_N()},
          {"rank", v.rank},
          {"basis", v.basis.monomials},
          {"points", points_to_json(v.points)},
          {"coords", coords}};
}

VarietyMatrix variety_from_json(const nlohmann::json& j) {
  auto field = field_from_json(j.at("field"));
  const auto n = j.at("n").get<std::size_t>();
  SigmaVector sigma(j.at("sigma_exponents").get<std::vector<std::uint32_t>>(), *field);
  auto v = build_variety(n, sigma, field);
  if (j.at("basis").get<std::vector<Exponent>>() != v.basis.monomials)
    throw std::invalid_argument("variety JSON: basis does not match the monomial basis for this sigma");
  if (points_from_json(j.at("points"), *field) != v.points)
    throw std::invalid_argument("variety JSON: points are not the canonical point list");
  const auto& rows = j.at("coords");
  if (rows.size() != v.coords.rows()) throw std::invalid_argument("variety JSON: wrong number of rows");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto row = rows[r].get<std::vector<Elem>>();
    auto expect = v.coords.row(r);
    if (!std::equal(row.begin(), row.end(), expect.begin(), expect.end()))
      throw std::invalid_argument("variety JSON: row " + std::to_string(r) + " is not the embedding of its point");
  }
  return v;
}

ScrollFrame::ScrollFrame(std::size_t n_, SigmaVector sigma_, FieldPtr field_)
    : n(n_), sigma(std::move(sigma_)), field(std::move(field_)), basis(monomial_basis(n, sigma)) {}

Vec ScrollFrame::shift(std::span<const Elem> v, std::size_t k) const {
  const std::size_t N = dim();
  Vec out(N, 0);
  for (std::size_t i = 0; i < N; ++i) out[(i + k * n) % N] = v[i];
  return out;
}

std::vector<Vec> ScrollFrame::scroll_vectors(const ProjPoint& p) const {
  const auto& f = *field;
  std::vector<Vec> out;
  for (std::size_t i = 0; i < sigma.d(); ++i) {
    Vec base(dim(), 0);
    for (std::size_t k = 0; k < n; ++k) base[k] = f.frobenius(p.coords[k], sigma.exponents()[i]);
    out.push_back(shift(base, i));
  }
  return out;
}

std::vector<std::pair<std::vector<std::size_t>, Elem>> plucker_coordinates(const ProjPoint& p,
                                                                          const ScrollFrame& frame) {
  const std::size_t d = frame.sigma.d();
  const std::size_t N = frame.dim();
  const auto vecs = frame.scroll_vectors(p);
  Matrix rows(frame.field, d, N);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t c = 0; c < N; ++c) rows(i, c) = vecs[i][c];

  std::vector<std::pair<std::vector<std::size_t>, Elem>> out;
  std::vector<std::size_t> s(d);
  std::iota(s.begin(), s.end(), 0);
  while (true) {
    out.emplace_back(s, determinant(rows.select_columns(s)));
    std::size_t i = d;
    while (i > 0 && s[i - 1] == N - d + (i - 1)) --i;
    if (i == 0) break;
    ++s[i - 1];
    for (std::size_t j = i; j < d; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

bool scroll_plucker_check(const ProjPoint& p, const ScrollFrame& frame) {
  const auto& f = *frame.field;
  const auto tensor = embed_point(p, frame.basis, f);
  const std::size_t d = frame.sigma.d();
  for (const auto& [subset, value] : plucker_coordinates(p, frame)) {
    bool transversal = true;
    for (std::size_t i = 0; i < d; ++i)
      if (subset[i] / frame.n != i) transversal = false;
    if (!transversal) {
      if (value != 0) return false;
      continue;
    }
    Exponent e(frame.n, 0);
    for (std::size_t i = 0; i < d; ++i)
      e[subset[i] - i * frame.n] += static_cast<std::uint32_t>(ipow(f.p(), frame.sigma.exponents()[i]));
    if (tensor[frame.basis.index_of(e)] != value) return false;
  }
  return true;
}

}  // namespace veronese
