#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "veronese/ff.hpp"

namespace veronese {

// Canonical representative of a projective point: first nonzero coordinate is 1.
struct ProjPoint {
  std::vector<Elem> coords;

  std::size_t dim() const { return coords.size(); }
  auto operator<=>(const ProjPoint&) const = default;
};

// Scales v to canonical form; throws std::invalid_argument on the zero vector.
ProjPoint normalize(std::span<const Elem> v, const FieldCtx& f);

// (q^{tn} - 1) / (q^t - 1) for field order q^t.
std::uint64_t point_count(std::size_t n, std::uint64_t field_order);

// All points of PG(n-1, q^t) in lexicographic order of their coordinate
// encodings. This order fixes the column order of the parity-check matrix.
std::vector<ProjPoint> enum_points(std::size_t n, const FieldCtx& f);

// Position of p in enum_points(n, f) order without materializing the list.
std::uint64_t point_index(const ProjPoint& p, const FieldCtx& f);

// True iff the points span a subspace of vector dimension <= 2.
bool is_collinear(std::span<const ProjPoint> points, const FieldCtx& f);

// Points of the line through two distinct points, sorted.
std::vector<ProjPoint> line_through(const ProjPoint& a, const ProjPoint& b, const FieldCtx& f);

// All lines of PG(n-1, q^t), each as the sorted list of indices into
// enum_points(n, f). Lines are ordered by their index lists.
std::vector<std::vector<std::size_t>> enumerate_lines(std::size_t n, const FieldCtx& f);

// The q'+1 points of the subline through the frame (P0, P1, P2) with P0, P1, P2
// at parameters infinity, 0, 1. Sorted.
std::vector<ProjPoint> subline_through(const ProjPoint& p0, const ProjPoint& p1, const ProjPoint& p2,
                                       std::uint64_t subfield_order, const FieldCtx& f);

// True iff the points are collinear and all lie on the subline through the
// first three.
bool on_common_subline(std::span<const ProjPoint> points, std::uint64_t subfield_order,
                       const FieldCtx& f);

// All distinct PG(1, q')-sublines of the line formed by `line` (its full point
// list), found by running over every frame. Each subline is a sorted point
// list; the result is sorted.
std::vector<std::vector<ProjPoint>> enumerate_sublines(std::span<const ProjPoint> line,
                                                       std::uint64_t subfield_order, const FieldCtx& f);

nlohmann::json points_to_json(std::span<const ProjPoint> points);
std::vector<ProjPoint> points_from_json(const nlohmann::json& j, const FieldCtx& f);

}  // namespace veronese
