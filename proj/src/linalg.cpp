#include "veronese/linalg.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace veronese {

Matrix::Matrix(FieldPtr ctx, std::size_t rows, std::size_t cols)
    : ctx_(std::move(ctx)), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

Matrix::Matrix(FieldPtr ctx, std::size_t rows, std::size_t cols, std::vector<Elem> data)
    : ctx_(std::move(ctx)), rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw std::invalid_argument("matrix data length != rows*cols");
  for (auto x : data_)
    if (!ctx_->valid(x)) throw std::invalid_argument("matrix entry is not a valid field element");
}

Matrix Matrix::identity(FieldPtr ctx, std::size_t n) {
  Matrix m(std::move(ctx), n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Vec Matrix::column(std::size_t c) const {
  Vec v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

Matrix Matrix::transpose() const {
  Matrix t(ctx_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::select_columns(std::span<const std::size_t> idx) const {
  Matrix s(ctx_, rows_, idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] >= cols_) throw std::invalid_argument("column index out of range");
    for (std::size_t r = 0; r < rows_; ++r) s(r, j) = (*this)(r, idx[j]);
  }
  return s;
}

Vec Matrix::apply(std::span<const Elem> v) const {
  if (v.size() != cols_) throw std::invalid_argument("vector length != matrix columns");
  const auto& f = *ctx_;
  Vec out(rows_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    Elem acc = 0;
    for (std::size_t c = 0; c < cols_; ++c) acc = f.add(acc, f.mul((*this)(r, c), v[c]));
    out[r] = acc;
  }
  return out;
}

Echelon rref(const Matrix& m) {
  Matrix a = m;
  const auto& f = m.field();
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t sel = row;
    while (sel < a.rows() && a(sel, col) == 0) ++sel;
    if (sel == a.rows()) continue;
    if (sel != row)
      for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(sel, c), a(row, c));
    const Elem inv = f.inv(a(row, col));
    for (std::size_t c = col; c < a.cols(); ++c) a(row, c) = f.mul(a(row, c), inv);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == row || a(r, col) == 0) continue;
      const Elem factor = a(r, col);
      for (std::size_t c = col; c < a.cols(); ++c)
        a(r, c) = f.sub(a(r, c), f.mul(factor, a(row, c)));
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(a), std::move(pivots)};
}

std::size_t rank(const Matrix& m) { return rref(m).pivots.size(); }

std::vector<Vec> kernel_basis(const Matrix& m) {
  const auto ech = rref(m);
  const auto& f = m.field();
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : ech.pivots) is_pivot[c] = true;
  std::vector<Vec> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    Vec v(m.cols(), 0);
    v[free] = 1;
    for (std::size_t i = 0; i < ech.pivots.size(); ++i) v[ech.pivots[i]] = f.neg(ech.reduced(i, free));
    basis.push_back(std::move(v));
  }
  return basis;
}

Elem determinant(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  Matrix a = m;
  const auto& f = m.field();
  const std::size_t n = a.rows();
  Elem det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t sel = col;
    while (sel < n && a(sel, col) == 0) ++sel;
    if (sel == n) return 0;
    if (sel != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(sel, c), a(col, c));
      det = f.neg(det);
    }
    det = f.mul(det, a(col, col));
    const Elem inv = f.inv(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a(r, col) == 0) continue;
      const Elem factor = f.mul(a(r, col), inv);
      for (std::size_t c = col; c < n; ++c) a(r, c) = f.sub(a(r, c), f.mul(factor, a(col, c)));
    }
  }
  return det;
}

bool is_independent(const Matrix& m, std::span<const std::size_t> columns) {
  std::vector<bool> seen(m.cols(), false);
  for (auto c : columns) {
    if (c >= m.cols()) throw std::invalid_argument("column index out of range");
    if (seen[c]) throw std::invalid_argument("duplicate column index");
    seen[c] = true;
  }
  if (columns.size() > m.rows()) return false;
  SpanWorkspace ws(m.field(), m.rows(), columns.size());
  Vec col(m.rows());
  for (auto c : columns) {
    for (std::size_t r = 0; r < m.rows(); ++r) col[r] = m(r, c);
    if (!ws.push(col)) return false;
  }
  return true;
}

SpanWorkspace::SpanWorkspace(const FieldCtx& ctx, std::size_t dim, std::size_t capacity)
    : ctx_(&ctx), dim_(dim), capacity_(capacity), rows_((capacity + 1) * dim, 0),
      pivot_(capacity + 1, 0) {}

std::size_t SpanWorkspace::reduce(std::span<const Elem> v, std::size_t slot) {
  const auto& f = *ctx_;
  Elem* w = rows_.data() + slot * dim_;
  std::copy(v.begin(), v.end(), w);
  for (std::size_t b = 0; b < size_; ++b) {
    const std::size_t piv = pivot_[b];
    const Elem c = w[piv];
    if (c == 0) continue;
    const Elem* basis = rows_.data() + b * dim_;
    const Elem nc = f.neg(c);
    w[piv] = 0;
    for (std::size_t r = piv + 1; r < dim_; ++r)
      if (basis[r] != 0) w[r] = f.add(w[r], f.mul(nc, basis[r]));
  }
  std::size_t piv = 0;
  while (piv < dim_ && w[piv] == 0) ++piv;
  return piv;
}

bool SpanWorkspace::push(std::span<const Elem> v) {
  if (size_ >= dim_) return false;
  if (size_ >= capacity_) throw std::logic_error("span workspace capacity exceeded");
  const std::size_t piv = reduce(v, size_);
  if (piv == dim_) return false;
  const auto& f = *ctx_;
  Elem* w = rows_.data() + size_ * dim_;
  const Elem inv = f.inv(w[piv]);
  for (std::size_t r = piv; r < dim_; ++r) w[r] = f.mul(w[r], inv);
  pivot_[size_] = piv;
  ++size_;
  return true;
}

bool SpanWorkspace::in_span(std::span<const Elem> v) {
  if (size_ >= dim_) return true;
  return reduce(v, capacity_) == dim_;
}

ColumnStore::ColumnStore(const Matrix& m) : dim_(m.rows()), count_(m.cols()), data_(m.rows() * m.cols()) {
  for (std::size_t c = 0; c < count_; ++c)
    for (std::size_t r = 0; r < dim_; ++r) data_[c * dim_ + r] = m(r, c);
}

void write_csv(std::ostream& os, const Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      os << m(r, c);
    }
    os << '\n';
  }
}

Matrix read_csv(std::istream& is, FieldPtr ctx) {
  std::vector<Elem> data;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(cell, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("CSV cell is not an integer: '" + cell + "'");
      }
      data.push_back(static_cast<Elem>(v));
      ++n;
    }
    if (rows == 0) cols = n;
    else if (n != cols) throw std::invalid_argument("CSV rows have differing lengths");
    ++rows;
  }
  return Matrix(std::move(ctx), rows, cols, std::move(data));
}

nlohmann::json to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<Elem>(row.begin(), row.end()));
  }
  const auto& f = m.field();
  return {{"p", f.p()}, {"e", f.e()}, {"t", f.t()}, {"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  auto ctx = build_field(j.at("p").get<std::uint32_t>(), j.at("e").get<std::uint32_t>(),
                         j.at("t").get<std::uint32_t>());
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  std::vector<Elem> data;
  data.reserve(rows * cols);
  const auto& d = j.at("data");
  if (d.size() != rows) throw std::invalid_argument("matrix JSON: data has wrong row count");
  for (const auto& row : d) {
    if (row.size() != cols) throw std::invalid_argument("matrix JSON: row has wrong length");
    for (const auto& x : row) data.push_back(x.get<Elem>());
  }
  return Matrix(std::move(ctx), rows, cols, std::move(data));
}

}  // namespace veronese
