#include "veronese/ff.hpp"

#include <numeric>
#include <sstream>

namespace veronese {
namespace {

using Poly = std::vector<std::uint32_t>;  // ascending coefficients over F_p

std::uint64_t checked_power(std::uint64_t base, std::uint32_t exp, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    r *= base;
    if (r > cap) return cap + 1;
  }
  return r;
}

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo monic b, in place.
void poly_mod(Poly& a, const Poly& b, std::uint32_t p) {
  trim(a);
  const std::size_t db = b.size() - 1;
  while (a.size() > db) {
    const std::uint64_t lead = a.back();
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t i = 0; i <= db; ++i) {
      const std::uint64_t sub = (lead * b[i]) % p;
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - sub) % p);
    }
    trim(a);
  }
}

Poly digits(std::uint64_t k, std::uint32_t p, std::uint32_t len) {
  Poly d(len);
  for (std::uint32_t i = 0; i < len; ++i) {
    d[i] = static_cast<std::uint32_t>(k % p);
    k /= p;
  }
  return d;
}

bool irreducible_by_trial_division(const Poly& f, std::uint32_t p) {
  const std::uint32_t deg = static_cast<std::uint32_t>(f.size() - 1);
  for (std::uint32_t d = 1; 2 * d <= deg; ++d) {
    const std::uint64_t count = checked_power(p, d, kMaxFieldOrder);
    for (std::uint64_t k = 0; k < count; ++k) {
      Poly g = digits(k, p, d);
      g.push_back(1);
      Poly r = f;
      poly_mod(r, g, p);
      if (r.empty()) return false;
    }
  }
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::uint32_t> smallest_irreducible(std::uint32_t p, std::uint32_t m) {
  if (!is_prime(p)) throw FieldError("characteristic p = " + std::to_string(p) + " is not prime");
  if (m == 0) throw FieldError("extension degree m must be at least 1");
  const std::uint64_t count = checked_power(p, m, kMaxFieldOrder);
  if (count > kMaxFieldOrder) throw FieldError("field order p^m exceeds the supported bound 2^20");
  // k enumerates (a_{m-1}, ..., a_0) in lexicographic order.
  for (std::uint64_t k = 0; k < count; ++k) {
    Poly f = digits(k, p, m);
    f.push_back(1);
    if (irreducible_by_trial_division(f, p)) return f;
  }
  throw FieldError("no irreducible polynomial found");  // unreachable for prime p
}

FieldPtr make_field(std::uint32_t p, std::uint32_t e, std::uint32_t t, bool use_tables) {
  if (!is_prime(p)) throw FieldError("characteristic p = " + std::to_string(p) + " is not prime");
  if (e == 0 || t == 0) throw FieldError("e and t must be at least 1 (m = e*t >= 1)");
  const std::uint32_t m = e * t;
  const std::uint64_t order = checked_power(p, m, kMaxFieldOrder);
  if (order > kMaxFieldOrder)
    throw FieldError("field order p^m = " + std::to_string(p) + "^" + std::to_string(m) +
                     " exceeds the supported bound 2^20");

  std::shared_ptr<FieldCtx> ctx(new FieldCtx());
  ctx->p_ = p;
  ctx->e_ = e;
  ctx->t_ = t;
  ctx->m_ = m;
  ctx->order_ = static_cast<std::uint32_t>(order);
  ctx->q_ = static_cast<std::uint32_t>(checked_power(p, e, kMaxFieldOrder));
  ctx->modulus_ = smallest_irreducible(p, m);
  ctx->pow_p_.resize(m + 1);
  ctx->pow_p_[0] = 1;
  for (std::uint32_t i = 1; i <= m; ++i) ctx->pow_p_[i] = ctx->pow_p_[i - 1] * p;

  const std::uint64_t group = order - 1;
  const auto factors = prime_factors(group);
  for (Elem g = 1; g < order; ++g) {
    bool primitive = true;
    for (auto r : factors) {
      if (ctx->pow_poly(g, group / r) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) {
      ctx->primitive_ = g;
      break;
    }
  }
  if (use_tables && order <= kTableModeLimit) ctx->build_tables();
  return ctx;
}

void FieldCtx::build_tables() {
  const std::uint32_t group = order_ - 1;
  exp_.assign(2 * static_cast<std::size_t>(group) + 1, 0);
  log_.assign(order_, 0);
  Elem x = 1;
  for (std::uint32_t i = 0; i < 2 * group + 1; ++i) {
    exp_[i] = x;
    if (i < group) log_[x] = i;
    x = mul_poly(x, primitive_);
  }
  zech_.assign(group, -1);
  for (std::uint32_t k = 0; k < group; ++k) {
    const Elem s = add_poly(1, exp_[k]);
    zech_[k] = s == 0 ? -1 : static_cast<std::int64_t>(log_[s]);
  }
  half_ = p_ == 2 ? 0 : group / 2;
  tables_ = true;
  if (order_ <= kDenseTableLimit) {
    dense_add_.resize(static_cast<std::size_t>(order_) * order_);
    dense_mul_.resize(static_cast<std::size_t>(order_) * order_);
    for (Elem a = 0; a < order_; ++a)
      for (Elem b = 0; b < order_; ++b) {
        dense_add_[a * order_ + b] = static_cast<std::uint8_t>(add_poly(a, b));
        dense_mul_[a * order_ + b] = static_cast<std::uint8_t>(mul_poly(a, b));
      }
    dense_ = true;
  }
}

std::string FieldCtx::modulus_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = modulus_.size(); i-- > 0;) {
    const auto c = modulus_[i];
    if (c == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0) {
      os << c;
      continue;
    }
    if (c != 1) os << c;
    os << 'x';
    if (i > 1) os << '^' << i;
  }
  return os.str();
}

std::vector<std::uint32_t> FieldCtx::coefficients(Elem x) const {
  if (!valid(x)) throw FieldError("element encoding out of range");
  return digits(x, p_, m_);
}

Elem FieldCtx::from_coefficients(std::span<const std::uint32_t> coeffs) const {
  if (coeffs.size() != m_) throw FieldError("coefficient vector must have length m");
  Elem x = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] >= p_) throw FieldError("coefficient out of range [0, p)");
    x += coeffs[i] * pow_p_[i];
  }
  return x;
}

Elem FieldCtx::add_poly(Elem a, Elem b) const {
  if (p_ == 2) return a ^ b;
  Elem r = 0;
  for (std::uint32_t i = 0; i < m_; ++i) {
    const std::uint32_t d = (a % p_ + b % p_) % p_;
    r += d * pow_p_[i];
    a /= p_;
    b /= p_;
  }
  return r;
}

Elem FieldCtx::neg_poly(Elem a) const {
  if (p_ == 2) return a;
  Elem r = 0;
  for (std::uint32_t i = 0; i < m_; ++i) {
    const std::uint32_t d = a % p_;
    r += ((p_ - d) % p_) * pow_p_[i];
    a /= p_;
  }
  return r;
}

Elem FieldCtx::mul_poly(Elem a, Elem b) const {
  if (a == 0 || b == 0) return 0;
  const Poly da = digits(a, p_, m_);
  const Poly db = digits(b, p_, m_);
  Poly prod(2 * m_ - 1, 0);
  for (std::uint32_t i = 0; i < m_; ++i) {
    if (da[i] == 0) continue;
    for (std::uint32_t j = 0; j < m_; ++j)
      prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + std::uint64_t{da[i]} * db[j]) % p_);
  }
  poly_mod(prod, modulus_, p_);
  Elem r = 0;
  for (std::size_t i = 0; i < prod.size(); ++i) r += prod[i] * pow_p_[i];
  return r;
}

Elem FieldCtx::pow_poly(Elem a, std::uint64_t k) const {
  Elem result = 1;
  Elem base = a;
  while (k > 0) {
    if (k & 1) result = mul_poly(result, base);
    base = mul_poly(base, base);
    k >>= 1;
  }
  return result;
}

Elem FieldCtx::add_zech(Elem a, Elem b) const {
  if (a == 0) return b;
  if (b == 0) return a;
  const std::uint32_t group = order_ - 1;
  const std::uint32_t i = log_[a];
  const std::uint32_t j = log_[b];
  const std::uint32_t k = j >= i ? j - i : j + group - i;
  const std::int64_t z = zech_[k];
  if (z < 0) return 0;
  return exp_[i + static_cast<std::uint32_t>(z)];
}

Elem FieldCtx::add_table(Elem a, Elem b) const {
  if (!tables_) throw FieldError("field context has no tables");
  if (p_ == 2) return a ^ b;
  return add_zech(a, b);
}

Elem FieldCtx::mul_table(Elem a, Elem b) const {
  if (!tables_) throw FieldError("field context has no tables");
  if (a == 0 || b == 0) return 0;
  return exp_[log_[a] + log_[b]];
}

Elem FieldCtx::inv(Elem a) const {
  if (a == 0) throw FieldError("inverse of zero");
  if (tables_) return exp_[(order_ - 1) - log_[a]];
  return pow_poly(a, order_ - 2);
}

Elem FieldCtx::pow(Elem a, std::uint64_t k) const {
  if (k == 0) return 1;
  if (a == 0) return 0;
  if (tables_) {
    const std::uint64_t group = order_ - 1;
    return exp_[(log_[a] * (k % group)) % group];
  }
  return pow_poly(a, k);
}

Elem FieldCtx::frobenius(Elem x, std::uint32_t s) const {
  if (s >= m_)
    throw FieldError("frobenius exponent s = " + std::to_string(s) + " must satisfy 0 <= s < m = " +
                     std::to_string(m_));
  return pow(x, pow_p_[s]);
}

std::vector<std::uint64_t> FieldCtx::subfield_orders() const {
  std::vector<std::uint64_t> out;
  for (std::uint32_t s = 1; s <= m_; ++s)
    if (m_ % s == 0) out.push_back(pow_p_[s]);
  return out;
}

bool FieldCtx::is_subfield_order(std::uint64_t qq) const {
  for (auto o : subfield_orders())
    if (o == qq) return true;
  return false;
}

bool FieldCtx::in_subfield(Elem x, std::uint64_t subfield_order) const {
  return pow(x, subfield_order) == x;
}

std::vector<Elem> FieldCtx::subfield_elements(std::uint64_t subfield_order) const {
  if (!is_subfield_order(subfield_order))
    throw FieldError("q' = " + std::to_string(subfield_order) + " is not the order of a subfield of GF(" +
                     std::to_string(order_) + ")");
  std::vector<Elem> out;
  out.reserve(subfield_order);
  for (Elem x = 0; x < order_; ++x)
    if (in_subfield(x, subfield_order)) out.push_back(x);
  return out;
}

}  // namespace veronese
