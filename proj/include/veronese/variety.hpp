#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "veronese/ff.hpp"
#include "veronese/linalg.hpp"
#include "veronese/pg.hpp"

namespace veronese {

class SigmaError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Raised when |sigma| >= q^t. Below that bound distinct monomials are distinct
// functions on the field, which every construction here relies on.
class NormBoundError : public SigmaError {
public:
  using SigmaError::SigmaError;
};

using Exponent = std::vector<std::uint32_t>;

// The automorphism tuple (x -> x^{p^{s_0}}, ..., x -> x^{p^{s_{d-1}}}).
// Exponents are kept sorted; s_0 must be 0.
class SigmaVector {
public:
  SigmaVector(std::vector<std::uint32_t> exponents, const FieldCtx& f);
  // Exponents given as powers of q = p^e: s_i = e * h_i.
  static SigmaVector from_q_powers(const std::vector<std::uint32_t>& h, const FieldCtx& f);

  const std::vector<std::uint32_t>& exponents() const { return exps_; }
  std::size_t d() const { return exps_.size(); }
  // Distinct exponents s^(0) < ... < s^(k) and their multiplicities d_j.
  const std::vector<std::uint32_t>& distinct() const { return distinct_; }
  const std::vector<std::size_t>& multiplicities() const { return mult_; }
  // |sigma| = sum_i p^{s_i}.
  std::uint64_t norm() const { return norm_; }
  // q' = p^{gcd of the nonzero s_i and m}.
  std::uint64_t fixed_subfield_order() const { return qprime_; }
  std::uint32_t p() const { return p_; }
  std::uint32_t m() const { return m_; }

  // True when sum_{i<=j} d_i p^{s^(i)} < p^{s^(j+1)} for every j, which forces
  // all tensor multi-indices to give distinct monomials (no collapse).
  bool digit_separated() const;

  bool operator==(const SigmaVector&) const = default;

private:
  std::vector<std::uint32_t> exps_, distinct_;
  std::vector<std::size_t> mult_;
  std::uint64_t norm_ = 0, qprime_ = 0;
  std::uint32_t p_ = 0, m_ = 0;
};

// Deduplicated twisted monomials coordinatizing the variety.
struct MonomialBasis {
  std::size_t n = 0;
  // Total exponent vectors, lexicographically descending (all share degree |sigma|).
  std::vector<Exponent> monomials;
  // Per distinct automorphism j: the degree-d_j exponent vectors, descending.
  std::vector<std::vector<Exponent>> factor_monomials;
  // Mixed-radix index over factor_monomials (first factor most significant)
  // to the index of the resulting monomial.
  std::vector<std::size_t> origin_map;
  std::uint64_t expected_N = 0;

  std::size_t effective_N() const { return monomials.size(); }
  bool collapsed() const { return effective_N() < expected_N; }
  // Index of the monomial with this total exponent; throws if absent.
  std::size_t index_of(const Exponent& e) const;

  std::map<Exponent, std::size_t> lookup;
};

MonomialBasis monomial_basis(std::size_t n, const SigmaVector& sigma);

// Monomial values at the canonical coordinates of p, with 0^0 = 1.
Vec embed_point(const ProjPoint& p, const MonomialBasis& basis, const FieldCtx& f);

struct VarietyMatrix {
  FieldPtr field;
  std::size_t n = 0;
  SigmaVector sigma;
  MonomialBasis basis;
  std::vector<ProjPoint> points;
  Matrix coords;        // |points| x effective_N, row i = embed_point(points[i])
  std::size_t rank = 0; // rank of coords
};

// Cap on |points| * effective_N.
inline constexpr std::uint64_t kMaxVarietyEntries = 50'000'000;

// Embeds every point of PG(n-1, q^t). Rows are computed in parallel across
// `workers` threads; the result does not depend on the worker count.
VarietyMatrix build_variety(std::size_t n, const SigmaVector& sigma, FieldPtr field, unsigned workers = 1);

// Throws std::logic_error if two rows are proportional.
void check_injective(const VarietyMatrix& v);

nlohmann::json field_to_json(const FieldCtx& f);
FieldPtr field_from_json(const nlohmann::json& j);
nlohmann::json to_json(const VarietyMatrix& v);
// Rebuilds and validates a variety export; rows must match the embedding.
VarietyMatrix variety_from_json(const nlohmann::json& j);

// d copies of V(n) placed as consecutive coordinate blocks of V(nd), with the
// cyclic shift e_i -> e_{i+n}.
struct ScrollFrame {
  ScrollFrame(std::size_t n, SigmaVector sigma, FieldPtr field);

  std::size_t n;
  SigmaVector sigma;
  FieldPtr field;
  MonomialBasis basis;

  std::size_t dim() const { return n * sigma.d(); }
  // Applies the shift k times to a vector of V(nd).
  Vec shift(std::span<const Elem> v, std::size_t k) const;
  // The d vectors P^{sigma_0}, P^{phi sigma_1}, ..., spanning the scroll space of P.
  std::vector<Vec> scroll_vectors(const ProjPoint& p) const;
};

// d x d minors of the scroll vectors over all d-subsets of {0, ..., nd-1}, in
// lexicographic subset order.
std::vector<std::pair<std::vector<std::size_t>, Elem>> plucker_coordinates(const ProjPoint& p,
                                                                          const ScrollFrame& frame);

// Checks that the Plucker coordinates vanish off transversal index sets and
// agree with the tensor coordinates of embed_point on them (sign +1 with
// blocks in ascending order).
bool scroll_plucker_check(const ProjPoint& p, const ScrollFrame& frame);

}  // namespace veronese
