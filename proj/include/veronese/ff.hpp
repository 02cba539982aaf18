#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace veronese {

// Field elements are stored as their canonical integer encoding
// sum_i c_i * p^i over the coefficient vector (c_0, ..., c_{m-1}) with respect
// to the defining modulus. Zero is encoded as 0 and one as 1.
using Elem = std::uint32_t;

// Largest field order accepted by build_field.
inline constexpr std::uint64_t kMaxFieldOrder = std::uint64_t{1} << 20;
// Fields at or below this order carry log/antilog and Zech tables.
inline constexpr std::uint64_t kTableModeLimit = kMaxFieldOrder;
// Fields at or below this order additionally carry dense add/mul tables.
inline constexpr std::uint64_t kDenseTableLimit = 256;

class FieldError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

bool is_prime(std::uint64_t n);

// GF(p^m), m = e*t, viewed as F_{q^t} with q = p^e. Immutable once built.
class FieldCtx : public std::enable_shared_from_this<FieldCtx> {
public:
  enum class Mode { Polynomial, Table };

  std::uint32_t p() const { return p_; }
  std::uint32_t e() const { return e_; }
  std::uint32_t t() const { return t_; }
  std::uint32_t m() const { return m_; }
  std::uint32_t q() const { return q_; }          // p^e
  std::uint32_t order() const { return order_; }  // p^m
  Mode mode() const { return tables_ ? Mode::Table : Mode::Polynomial; }

  // Monic modulus, coefficients ascending (a_0, ..., a_{m-1}, 1).
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  std::string modulus_string() const;

  // Smallest encoding of multiplicative order p^m - 1.
  Elem primitive() const { return primitive_; }

  std::vector<std::uint32_t> coefficients(Elem x) const;
  Elem from_coefficients(std::span<const std::uint32_t> coeffs) const;
  bool valid(Elem x) const { return x < order_; }

  Elem add(Elem a, Elem b) const {
    if (p_ == 2) return a ^ b;
    if (dense_) return dense_add_[a * order_ + b];
    if (tables_) return add_zech(a, b);
    return add_poly(a, b);
  }
  Elem neg(Elem a) const {
    if (p_ == 2 || a == 0) return a;
    if (tables_) return exp_[log_[a] + half_];
    return neg_poly(a);
  }
  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
  Elem mul(Elem a, Elem b) const {
    if (dense_) return dense_mul_[a * order_ + b];
    if (tables_) {
      if (a == 0 || b == 0) return 0;
      return exp_[log_[a] + log_[b]];
    }
    return mul_poly(a, b);
  }
  // Throws FieldError on zero.
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  // a^k with 0^0 = 1.
  Elem pow(Elem a, std::uint64_t k) const;

  // x -> x^{p^s}, 0 <= s < m.
  Elem frobenius(Elem x, std::uint32_t s) const;

  // Subfield orders p^s with s | m, ascending.
  std::vector<std::uint64_t> subfield_orders() const;
  bool is_subfield_order(std::uint64_t qq) const;
  // The solutions of x^{q'} = x, ascending by encoding.
  std::vector<Elem> subfield_elements(std::uint64_t subfield_order) const;
  bool in_subfield(Elem x, std::uint64_t subfield_order) const;

  // Coefficient-vector arithmetic, independent of any table.
  Elem add_poly(Elem a, Elem b) const;
  Elem neg_poly(Elem a) const;
  Elem mul_poly(Elem a, Elem b) const;
  Elem pow_poly(Elem a, std::uint64_t k) const;

  // Table arithmetic; throws if this context was built without tables.
  Elem add_table(Elem a, Elem b) const;
  Elem mul_table(Elem a, Elem b) const;

private:
  friend std::shared_ptr<const FieldCtx> make_field(std::uint32_t, std::uint32_t,
                                                    std::uint32_t, bool);

  FieldCtx() = default;
  Elem add_zech(Elem a, Elem b) const;
  void build_tables();

  std::uint32_t p_ = 0, e_ = 0, t_ = 0, m_ = 0;
  std::uint32_t q_ = 0, order_ = 0;
  std::vector<std::uint32_t> modulus_;
  std::vector<std::uint32_t> pow_p_;  // p^i, i = 0..m
  Elem primitive_ = 0;

  bool tables_ = false;
  bool dense_ = false;
  std::uint32_t half_ = 0;            // log(-1) = (p^m - 1) / 2 for odd p
  std::vector<std::uint32_t> log_;    // log_[0] unused
  std::vector<Elem> exp_;             // length 2(p^m - 1)
  std::vector<std::int64_t> zech_;    // log(1 + g^k), -1 when 1 + g^k = 0
  std::vector<std::uint8_t> dense_add_, dense_mul_;
};

using FieldPtr = std::shared_ptr<const FieldCtx>;

FieldPtr make_field(std::uint32_t p, std::uint32_t e, std::uint32_t t, bool use_tables);

// GF(p^{e t}) with the lexicographically smallest monic irreducible modulus.
// Tables are attached automatically when p^m <= kTableModeLimit unless
// use_tables is false.
inline FieldPtr build_field(std::uint32_t p, std::uint32_t e, std::uint32_t t,
                            bool use_tables = true) {
  return make_field(p, e, t, use_tables);
}
inline FieldPtr build_field(std::uint32_t p, std::uint32_t m) {
  return build_field(p, 1, m, true);
}

// Lexicographically smallest monic irreducible polynomial of degree m over
// F_p, comparing (a_{m-1}, ..., a_0). Coefficients returned ascending.
std::vector<std::uint32_t> smallest_irreducible(std::uint32_t p, std::uint32_t m);

}  // namespace veronese
