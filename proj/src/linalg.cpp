#include "charstrat/linalg.hpp"

#include <sstream>
#include <utility>

namespace charstrat {

namespace {

struct FiniteBackend {
  using T = std::uint32_t;
  const FiniteOps& o;
  Field field;

  T from(const Elem& e) const { return e.index(); }
  Elem to(T v) const { return field.element(v); }
  static bool zero(T v) { return v == 0; }
  T mul(T a, T b) const { return o.mul(a, b); }
  T sub(T a, T b) const { return o.sub(a, b); }
  T inv(T a) const { return o.inv(a); }
  T neg(T a) const { return o.neg(a); }
};

struct RationalBackend {
  using T = mpq_class;
  Field field;

  T from(const Elem& e) const { return e.rational(); }
  Elem to(const T& v) const { return field.from_rational(v); }
  static bool zero(const T& v) { return sgn(v) == 0; }
  T mul(const T& a, const T& b) const { return a * b; }
  T sub(const T& a, const T& b) const { return a - b; }
  T inv(const T& a) const { return 1 / a; }
  T neg(const T& a) const { return -a; }
};

// In-place RREF on a row-major buffer; returns pivot columns.
template <class B>
std::vector<std::size_t> rref_inplace(const B& b, std::vector<typename B::T>& a, std::size_t rows,
                                      std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t i = r;
    while (i < rows && B::zero(a[i * cols + c])) ++i;
    if (i == rows) continue;
    if (i != r) {
      for (std::size_t k = c; k < cols; ++k) std::swap(a[i * cols + k], a[r * cols + k]);
    }
    const auto pinv = b.inv(a[r * cols + c]);
    for (std::size_t k = c; k < cols; ++k) a[r * cols + k] = b.mul(a[r * cols + k], pinv);
    for (std::size_t i2 = 0; i2 < rows; ++i2) {
      if (i2 == r || B::zero(a[i2 * cols + c])) continue;
      const auto f = a[i2 * cols + c];
      for (std::size_t k = c; k < cols; ++k) {
        if (!B::zero(a[r * cols + k])) a[i2 * cols + k] = b.sub(a[i2 * cols + k], b.mul(f, a[r * cols + k]));
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class F>
auto with_backend(const Field& field, F&& fn) {
  if (field.is_finite()) return fn(FiniteBackend{field.ops(), field});
  return fn(RationalBackend{field});
}

template <class B>
std::vector<typename B::T> load(const B& b, const Matrix& m) {
  std::vector<typename B::T> a;
  a.reserve(m.rows() * m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) a.push_back(b.from(m.at(r, c)));
  }
  return a;
}

}  // namespace

void check_field(const Field& field, const Vector& v) {
  for (const Elem& e : v) {
    if (!e.valid() || e.field() != field) fail(ErrorCode::FieldMismatch, "vector entry from another field");
  }
}

Matrix::Matrix(Field field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols), data_(rows * cols, field.zero()) {}

Matrix Matrix::identity(Field field, std::size_t n) {
  Matrix m(field, n, n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = field.one();
  return m;
}

Matrix Matrix::from_rows(Field field, const std::vector<Vector>& rows, std::size_t cols) {
  if (!rows.empty()) cols = rows[0].size();
  Matrix m(field, rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) fail(ErrorCode::DimensionMismatch, "ragged rows");
    check_field(field, rows[r]);
    for (std::size_t c = 0; c < cols; ++c) m.data_[r * cols + c] = rows[r][c];
  }
  return m;
}

Matrix Matrix::from_columns(Field field, std::size_t rows, const std::vector<Vector>& cols) {
  Matrix m(field, rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].size() != rows) fail(ErrorCode::DimensionMismatch, "column length");
    check_field(field, cols[c]);
    for (std::size_t r = 0; r < rows; ++r) m.data_[r * cols.size() + c] = cols[c][r];
  }
  return m;
}

Matrix Matrix::from_ints(Field field, const std::vector<std::vector<long long>>& rows) {
  std::vector<Vector> v;
  for (const auto& row : rows) {
    Vector x;
    for (long long c : row) x.push_back(field.from_int(c));
    v.push_back(std::move(x));
  }
  return from_rows(field, v);
}

void Matrix::set(std::size_t r, std::size_t c, const Elem& v) {
  if (!v.valid() || v.field() != field_) fail(ErrorCode::FieldMismatch, "entry from another field");
  data_[r * cols_ + c] = v;
}

Vector Matrix::row(std::size_t r) const {
  return Vector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

Vector Matrix::column(std::size_t c) const {
  Vector v;
  v.reserve(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v.push_back(at(r, c));
  return v;
}

Matrix Matrix::transpose() const {
  Matrix t(field_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t.data_[c * rows_ + r] = at(r, c);
  }
  return t;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_) fail(ErrorCode::DimensionMismatch, "matrix product shapes");
  if (field_ != o.field_) fail(ErrorCode::FieldMismatch, "matrix product fields");
  Matrix p(field_, rows_, o.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const Elem& a = at(r, k);
      if (a.is_zero()) continue;
      for (std::size_t c = 0; c < o.cols_; ++c) {
        if (!o.at(k, c).is_zero()) p.data_[r * o.cols_ + c] += a * o.at(k, c);
      }
    }
  }
  return p;
}

Vector Matrix::operator*(const Vector& v) const {
  if (v.size() != cols_) fail(ErrorCode::DimensionMismatch, "matrix-vector shapes");
  check_field(field_, v);
  Vector out(rows_, field_.zero());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (!at(r, c).is_zero() && !v[c].is_zero()) out[r] += at(r, c) * v[c];
    }
  }
  return out;
}

Matrix Matrix::operator+(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorCode::DimensionMismatch, "matrix sum shapes");
  Matrix s = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) s.data_[i] += o.data_[i];
  return s;
}

Matrix Matrix::operator-(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorCode::DimensionMismatch, "matrix difference shapes");
  Matrix s = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) s.data_[i] -= o.data_[i];
  return s;
}

bool operator==(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.field_ != b.field_) return false;
  for (std::size_t i = 0; i < a.data_.size(); ++i) {
    if (a.data_[i] != b.data_[i]) return false;
  }
  return true;
}

bool Matrix::is_zero() const {
  for (const Elem& e : data_) {
    if (!e.is_zero()) return false;
  }
  return true;
}

Matrix Matrix::block(std::size_t r0, std::size_t nr, std::size_t c0, std::size_t nc) const {
  Matrix b(field_, nr, nc);
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t c = 0; c < nc; ++c) b.data_[r * nc + c] = at(r0 + r, c0 + c);
  }
  return b;
}

std::string Matrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t r = 0; r < rows_; ++r) {
    if (r) os << ',';
    os << '[';
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c) os << ',';
      os << at(r, c).to_string();
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

Matrix rref(const Matrix& m, std::vector<std::size_t>* pivots) {
  return with_backend(m.field(), [&](const auto& b) {
    auto a = load(b, m);
    auto piv = rref_inplace(b, a, m.rows(), m.cols());
    if (pivots) *pivots = piv;
    Matrix out(m.field(), m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) out.set(r, c, b.to(a[r * m.cols() + c]));
    }
    return out;
  });
}

namespace {

template <class B>
std::vector<Vector> kernel_from_rref(const B& b, const std::vector<typename B::T>& a, std::size_t cols,
                                     const std::vector<std::size_t>& piv) {
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : piv) is_pivot[c] = true;
  std::vector<Vector> basis;
  for (std::size_t j = 0; j < cols; ++j) {
    if (is_pivot[j]) continue;
    Vector v(cols, b.field.zero());
    v[j] = b.field.one();
    for (std::size_t k = 0; k < piv.size(); ++k) v[piv[k]] = b.to(b.neg(a[k * cols + j]));
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

RankProfile rank_profile(const Matrix& m) {
  return with_backend(m.field(), [&](const auto& b) {
    RankProfile out;
    auto a = load(b, m);
    out.pivot_columns = rref_inplace(b, a, m.rows(), m.cols());
    out.rank = out.pivot_columns.size();
    out.kernel_basis = kernel_from_rref(b, a, m.cols(), out.pivot_columns);
    const Matrix t = m.transpose();
    auto at = load(b, t);
    auto tpiv = rref_inplace(b, at, t.rows(), t.cols());
    out.cokernel_projection = Matrix::from_rows(m.field(), kernel_from_rref(b, at, t.cols(), tpiv), m.rows());
    return out;
  });
}

std::size_t rank(const Matrix& m) {
  if (m.field().is_finite()) {
    std::vector<std::uint32_t> a;
    a.reserve(m.rows() * m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) a.push_back(m.at(r, c).index());
    }
    return rank_raw(m.field().ops(), a.data(), m.rows(), m.cols());
  }
  std::vector<std::size_t> piv;
  rref(m, &piv);
  return piv.size();
}

std::optional<Vector> solve_linear(const Matrix& a, const Vector& rhs) {
  if (rhs.size() != a.rows()) fail(ErrorCode::DimensionMismatch, "right-hand side length");
  check_field(a.field(), rhs);
  const std::size_t n = a.cols();
  return with_backend(a.field(), [&](const auto& b) -> std::optional<Vector> {
    using T = typename std::decay_t<decltype(b)>::T;
    std::vector<T> aug;
    aug.reserve(a.rows() * (n + 1));
    for (std::size_t r = 0; r < a.rows(); ++r) {
      for (std::size_t c = 0; c < n; ++c) aug.push_back(b.from(a.at(r, c)));
      aug.push_back(b.from(rhs[r]));
    }
    auto piv = rref_inplace(b, aug, a.rows(), n + 1);
    if (!piv.empty() && piv.back() == n) return std::nullopt;
    Vector x(n, a.field().zero());
    for (std::size_t k = 0; k < piv.size(); ++k) x[piv[k]] = b.to(aug[k * (n + 1) + n]);
    return x;
  });
}

std::optional<Matrix> inverse(const Matrix& m) {
  if (m.rows() != m.cols()) fail(ErrorCode::DimensionMismatch, "inverse of a non-square matrix");
  const std::size_t n = m.rows();
  return with_backend(m.field(), [&](const auto& b) -> std::optional<Matrix> {
    using T = typename std::decay_t<decltype(b)>::T;
    std::vector<T> aug;
    aug.reserve(n * 2 * n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) aug.push_back(b.from(m.at(r, c)));
      for (std::size_t c = 0; c < n; ++c) aug.push_back(b.from(r == c ? m.field().one() : m.field().zero()));
    }
    auto piv = rref_inplace(b, aug, n, 2 * n);
    if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
    Matrix out(m.field(), n, n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) out.set(r, c, b.to(aug[r * 2 * n + n + c]));
    }
    return out;
  });
}

std::size_t rank_raw(const FiniteOps& o, std::uint32_t* a, std::size_t rows, std::size_t cols) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t i = r;
    while (i < rows && a[i * cols + c] == 0) ++i;
    if (i == rows) continue;
    if (i != r) {
      for (std::size_t k = c; k < cols; ++k) std::swap(a[i * cols + k], a[r * cols + k]);
    }
    const std::uint32_t pinv = o.inv(a[r * cols + c]);
    for (std::size_t i2 = r + 1; i2 < rows; ++i2) {
      const std::uint32_t x = a[i2 * cols + c];
      if (x == 0) continue;
      const std::uint32_t f = o.mul(x, pinv);
      for (std::size_t k = c; k < cols; ++k) {
        const std::uint32_t y = a[r * cols + k];
        if (y) a[i2 * cols + k] = o.sub(a[i2 * cols + k], o.mul(f, y));
      }
    }
    ++r;
  }
  return r;
}

}  // namespace charstrat
