#include "veronese/pg.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "veronese/linalg.hpp"

namespace veronese {
namespace {

std::uint64_t ipow(std::uint64_t b, std::size_t k) {
  std::uint64_t r = 1;
  while (k--) r *= b;
  return r;
}

Matrix coordinate_matrix(std::span<const ProjPoint> points, const FieldCtx& f) {
  const std::size_t n = points.front().dim();
  Matrix m(f.shared_from_this(), n, points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].dim() != n) throw std::invalid_argument("points have differing dimensions");
    for (std::size_t i = 0; i < n; ++i) {
      if (!f.valid(points[j].coords[i])) throw std::invalid_argument("invalid coordinate");
      m(i, j) = points[j].coords[i];
    }
  }
  return m;
}

}  // namespace

ProjPoint normalize(std::span<const Elem> v, const FieldCtx& f) {
  std::size_t lead = 0;
  while (lead < v.size() && v[lead] == 0) ++lead;
  if (lead == v.size()) throw std::invalid_argument("the zero vector is not a projective point");
  const Elem inv = f.inv(v[lead]);
  ProjPoint p;
  p.coords.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p.coords[i] = f.mul(v[i], inv);
  return p;
}

std::uint64_t point_count(std::size_t n, std::uint64_t field_order) {
  return (ipow(field_order, n) - 1) / (field_order - 1);
}

std::vector<ProjPoint> enum_points(std::size_t n, const FieldCtx& f) {
  if (n == 0) throw std::invalid_argument("projective dimension: n must be at least 1");
  const std::uint64_t q = f.order();
  std::vector<ProjPoint> out;
  out.reserve(point_count(n, q));
  // Leading 1 at position k; later k sorts first lexicographically.
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t tail = n - 1 - k;
    const std::uint64_t count = ipow(q, tail);
    for (std::uint64_t code = 0; code < count; ++code) {
      ProjPoint p;
      p.coords.assign(n, 0);
      p.coords[k] = 1;
      std::uint64_t c = code;
      for (std::size_t i = n; i-- > k + 1;) {
        p.coords[i] = static_cast<Elem>(c % q);
        c /= q;
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::uint64_t point_index(const ProjPoint& p, const FieldCtx& f) {
  const std::size_t n = p.dim();
  const std::uint64_t q = f.order();
  std::size_t k = 0;
  while (k < n && p.coords[k] == 0) ++k;
  if (k == n || p.coords[k] != 1) throw std::invalid_argument("point is not in canonical form");
  const std::size_t tail = n - 1 - k;
  std::uint64_t offset = (ipow(q, tail) - 1) / (q - 1);
  std::uint64_t code = 0;
  for (std::size_t i = k + 1; i < n; ++i) code = code * q + p.coords[i];
  return offset + code;
}

bool is_collinear(std::span<const ProjPoint> points, const FieldCtx& f) {
  if (points.size() < 2) throw std::invalid_argument("is_collinear needs at least 2 points");
  return rank(coordinate_matrix(points, f)) <= 2;
}

std::vector<ProjPoint> line_through(const ProjPoint& a, const ProjPoint& b, const FieldCtx& f) {
  if (a == b) throw std::invalid_argument("line_through needs two distinct points");
  std::vector<ProjPoint> pts{a};
  std::vector<Elem> v(a.dim());
  for (Elem z = 0; z < f.order(); ++z) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.add(b.coords[i], f.mul(z, a.coords[i]));
    pts.push_back(normalize(v, f));
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

std::vector<std::vector<std::size_t>> enumerate_lines(std::size_t n, const FieldCtx& f) {
  if (n < 2) return {};
  const Elem q = f.order();
  std::vector<std::vector<std::size_t>> lines;
  // Each line is the row space of a unique 2 x n reduced echelon matrix.
  for (std::size_t c1 = 0; c1 < n; ++c1) {
    for (std::size_t c2 = c1 + 1; c2 < n; ++c2) {
      std::vector<std::size_t> free1, free2;
      for (std::size_t i = c1 + 1; i < n; ++i)
        if (i != c2) free1.push_back(i);
      for (std::size_t i = c2 + 1; i < n; ++i) free2.push_back(i);
      const std::uint64_t total = ipow(q, free1.size() + free2.size());
      for (std::uint64_t code = 0; code < total; ++code) {
        std::vector<Elem> r1(n, 0), r2(n, 0);
        r1[c1] = 1;
        r2[c2] = 1;
        std::uint64_t c = code;
        for (auto i : free1) { r1[i] = static_cast<Elem>(c % q); c /= q; }
        for (auto i : free2) { r2[i] = static_cast<Elem>(c % q); c /= q; }
        std::vector<std::size_t> idx;
        idx.reserve(q + 1);
        for (const auto& pt : line_through(ProjPoint{r2}, ProjPoint{r1}, f))
          idx.push_back(static_cast<std::size_t>(point_index(pt, f)));
        std::sort(idx.begin(), idx.end());
        lines.push_back(std::move(idx));
      }
    }
  }
  std::sort(lines.begin(), lines.end());
  return lines;
}

namespace {

std::vector<ProjPoint> subline_with(const ProjPoint& p0, const ProjPoint& p1, const ProjPoint& p2,
                                    std::span<const Elem> sub, const FieldCtx& f) {
  if (p0 == p1 || p0 == p2 || p1 == p2) throw std::invalid_argument("subline frame points must be distinct");
  const std::vector<ProjPoint> frame{p0, p1, p2};
  if (!is_collinear(frame, f)) throw std::invalid_argument("subline frame points must be collinear");

  // Write P2 = a P0 + b P1 from the one-dimensional kernel of [P0 P1 P2].
  const auto ker = kernel_basis(coordinate_matrix(frame, f));
  const Vec& k = ker.front();
  const Elem minus_inv = f.neg(f.inv(k[2]));
  const Elem a = f.mul(k[0], minus_inv);
  const Elem b = f.mul(k[1], minus_inv);

  const std::size_t n = p0.dim();
  std::vector<ProjPoint> pts{p0};
  std::vector<Elem> v(n);
  for (Elem z : sub) {
    for (std::size_t i = 0; i < n; ++i)
      v[i] = f.add(f.mul(b, p1.coords[i]), f.mul(z, f.mul(a, p0.coords[i])));
    pts.push_back(normalize(v, f));
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace

std::vector<ProjPoint> subline_through(const ProjPoint& p0, const ProjPoint& p1, const ProjPoint& p2,
                                       std::uint64_t subfield_order, const FieldCtx& f) {
  const auto sub = f.subfield_elements(subfield_order);
  return subline_with(p0, p1, p2, sub, f);
}

bool on_common_subline(std::span<const ProjPoint> points, std::uint64_t subfield_order, const FieldCtx& f) {
  if (points.size() < 3) throw std::invalid_argument("on_common_subline needs at least 3 points");
  if (!is_collinear(points, f)) return false;
  const auto sub = subline_through(points[0], points[1], points[2], subfield_order, f);
  for (const auto& p : points)
    if (!std::binary_search(sub.begin(), sub.end(), p)) return false;
  return true;
}

std::vector<std::vector<ProjPoint>> enumerate_sublines(std::span<const ProjPoint> line,
                                                       std::uint64_t subfield_order, const FieldCtx& f) {
  const auto sub_elems = f.subfield_elements(subfield_order);
  std::set<std::vector<ProjPoint>> found;
  const std::size_t L = line.size();
  std::vector<ProjPoint> sorted(line.begin(), line.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<char> covered(L);
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = i + 1; j < L; ++j) {
      // Sublines through a fixed pair meet only in that pair, so each third
      // point selects exactly one of them.
      std::fill(covered.begin(), covered.end(), 0);
      for (std::size_t k = j + 1; k < L; ++k) {
        if (covered[k]) continue;
        auto sub = subline_with(sorted[i], sorted[j], sorted[k], sub_elems, f);
        for (const auto& pt : sub) {
          auto it = std::lower_bound(sorted.begin(), sorted.end(), pt);
          if (it == sorted.end() || *it != pt)
            throw std::invalid_argument("enumerate_sublines: input is not a full line");
          covered[static_cast<std::size_t>(it - sorted.begin())] = 1;
        }
        found.insert(std::move(sub));
      }
    }
  }
  return {found.begin(), found.end()};
}

nlohmann::json points_to_json(std::span<const ProjPoint> points) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : points) out.push_back(p.coords);
  return out;
}

std::vector<ProjPoint> points_from_json(const nlohmann::json& j, const FieldCtx& f) {
  std::vector<ProjPoint> out;
  for (const auto& row : j) {
    auto v = row.get<std::vector<Elem>>();
    for (auto x : v)
      if (!f.valid(x)) throw std::invalid_argument("point coordinate is not a valid field element");
    auto p = normalize(v, f);
    if (p.coords != v) throw std::invalid_argument("point is not in canonical form");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace veronese
