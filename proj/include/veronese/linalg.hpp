#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "veronese/ff.hpp"

namespace veronese {

using Vec = std::vector<Elem>;

class Matrix {
public:
  Matrix() = default;
  Matrix(FieldPtr ctx, std::size_t rows, std::size_t cols);
  Matrix(FieldPtr ctx, std::size_t rows, std::size_t cols, std::vector<Elem> data);

  static Matrix identity(FieldPtr ctx, std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const FieldCtx& field() const { return *ctx_; }
  const FieldPtr& field_ptr() const { return ctx_; }

  Elem operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Elem& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const Elem> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  Vec column(std::size_t c) const;
  const std::vector<Elem>& data() const { return data_; }

  Matrix transpose() const;
  Matrix select_columns(std::span<const std::size_t> idx) const;
  Vec apply(std::span<const Elem> v) const;  // M * v

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

private:
  FieldPtr ctx_;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Elem> data_;
};

std::size_t rank(const Matrix& m);

// Reduced row echelon form; pivot columns reported in increasing order.
struct Echelon {
  Matrix reduced;
  std::vector<std::size_t> pivots;
};
Echelon rref(const Matrix& m);

// Basis of {v : M v = 0}. One vector per free column (ascending), with a 1 in
// that free position and zeros in the other free positions.
std::vector<Vec> kernel_basis(const Matrix& m);

Elem determinant(const Matrix& m);

// True iff the selected columns are linearly independent. Throws
// std::invalid_argument on duplicate or out-of-range indices.
bool is_independent(const Matrix& m, std::span<const std::size_t> columns);

// Incremental column-span workspace for subset enumeration. Vectors are pushed
// and popped in stack order; push reports whether the new vector was
// independent of those already on the stack. No allocation after
// construction.
class SpanWorkspace {
public:
  SpanWorkspace(const FieldCtx& ctx, std::size_t dim, std::size_t capacity);

  // Pushes v when independent of the current stack; returns false (and leaves
  // the stack unchanged) when v lies in its span.
  bool push(std::span<const Elem> v);
  void pop() { --size_; }
  void clear() { size_ = 0; }
  std::size_t size() const { return size_; }
  std::size_t dim() const { return dim_; }
  bool in_span(std::span<const Elem> v);

private:
  // Reduces v into scratch slot `slot`, returns the pivot or dim_ when zero.
  std::size_t reduce(std::span<const Elem> v, std::size_t slot);

  const FieldCtx* ctx_;
  std::size_t dim_, capacity_, size_ = 0;
  std::vector<Elem> rows_;          // (capacity + 1) x dim, last slot is scratch
  std::vector<std::size_t> pivot_;
};

// Column-major copy of a matrix for the enumeration hot loop.
class ColumnStore {
public:
  explicit ColumnStore(const Matrix& m);
  std::span<const Elem> operator[](std::size_t c) const { return {data_.data() + c * dim_, dim_}; }
  std::size_t count() const { return count_; }
  std::size_t dim() const { return dim_; }

private:
  std::size_t dim_, count_;
  std::vector<Elem> data_;
};

// Import/export. CSV rows hold canonical integer encodings. JSON layout:
// {"p","e","t","rows","cols","data":[[...],...]}.
void write_csv(std::ostream& os, const Matrix& m);
Matrix read_csv(std::istream& is, FieldPtr ctx);
nlohmann::json to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace veronese
