#include "nori/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <utility>

#include "nori/kernels.hpp"

namespace nori {

namespace {
int cmpabs(const mpz_class& a, const mpz_class& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }
}  // namespace

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::CompositionNonzero: return "CompositionNonzero";
    case Errc::TorsionPresent: return "TorsionPresent";
    case Errc::NotIntegral: return "NotIntegral";
    case Errc::NotACycle: return "NotACycle";
    case Errc::IllDefinedMap: return "IllDefinedMap";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidComplex: return "InvalidComplex";
    case Errc::InvalidPair: return "InvalidPair";
    case Errc::NotPairMap: return "NotPairMap";
    case Errc::NotNested: return "NotNested";
    case Errc::NotACover: return "NotACover";
    case Errc::InvalidFiltration: return "InvalidFiltration";
    case Errc::TorsionTerm: return "TorsionTerm";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::NonFreeVertex: return "NonFreeVertex";
    case Errc::InvalidSubdiagram: return "InvalidSubdiagram";
    case Errc::AxiomViolation: return "AxiomViolation";
    case Errc::NotGoodPair: return "NotGoodPair";
    case Errc::ProductEscape: return "ProductEscape";
    case Errc::IntegralEscape: return "IntegralEscape";
    case Errc::WrongRank: return "WrongRank";
    case Errc::MissingProducts: return "MissingProducts";
    case Errc::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

std::string to_string(Ring ring) { return ring == Ring::Z ? "z" : "q"; }

Ring parse_ring(const std::string& text) {
  if (text == "z" || text == "Z") return Ring::Z;
  if (text == "q" || text == "Q") return Ring::Q;
  throw Error(Errc::InvalidInput, "unknown ring '" + text + "' (expected z or q)");
}

// ---------------------------------------------------------------------------
// Matrix

template <class T>
Matrix<T>::Matrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols)
    throw Error(Errc::DimensionMismatch, "entry count does not match rows x cols");
}

template <class T>
Matrix<T> Matrix<T>::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

template <class T>
Matrix<T> Matrix<T>::from_rows(const std::vector<std::vector<T>>& rows, std::size_t cols_if_empty) {
  const std::size_t nc = rows.empty() ? cols_if_empty : rows.front().size();
  Matrix m(rows.size(), nc);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != nc) throw Error(Errc::DimensionMismatch, "ragged matrix rows");
    for (std::size_t j = 0; j < nc; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

template <class T>
Matrix<T> Matrix<T>::column(const std::vector<T>& v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

template <class T>
std::vector<T> Matrix<T>::col(std::size_t j) const {
  std::vector<T> v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

template <class T>
void Matrix<T>::set_col(std::size_t j, const std::vector<T>& v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

template <class T>
Matrix<T> Matrix<T>::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

template <class T>
Matrix<T> Matrix<T>::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  Matrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

template <class T>
bool Matrix<T>::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const T& x) { return x == 0; });
}

template <class T>
void Matrix<T>::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

template <class T>
void Matrix<T>::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

template <class T>
Matrix<T>& Matrix<T>::operator+=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(Errc::DimensionMismatch, "matrix sum");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

template <class T>
Matrix<T>& Matrix<T>::operator-=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(Errc::DimensionMismatch, "matrix difference");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

template <class T>
Matrix<T>& Matrix<T>::operator*=(const T& s) {
  for (auto& x : data_) x *= s;
  return *this;
}

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream os;
    os << "matrix product " << a.rows() << "x" << a.cols() << " * " << b.rows() << "x" << b.cols();
    throw Error(Errc::DimensionMismatch, os.str());
  }
  return kernels::multiply(a, b);
}

template <class T>
std::vector<T> operator*(const Matrix<T>& a, const std::vector<T>& v) {
  if (a.cols() != v.size()) throw Error(Errc::DimensionMismatch, "matrix-vector product");
  std::vector<T> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0 && v[j] != 0) out[i] += a(i, j) * v[j];
  return out;
}

template <class T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
    }
  return k;
}

template <class T>
Matrix<T> hconcat(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows()) throw Error(Errc::DimensionMismatch, "hconcat");
  Matrix<T> m(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
  }
  return m;
}

template <class T>
Matrix<T> vconcat(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.cols()) throw Error(Errc::DimensionMismatch, "vconcat");
  Matrix<T> m(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, j) = b(i, j);
  return m;
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Matrix<T>& m) {
  os << '[';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) os << ", ";
    os << '[';
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ", ";
      os << m(i, j);
    }
    os << ']';
  }
  return os << ']';
}

template class Matrix<mpz_class>;
template class Matrix<mpq_class>;
template IntMatrix operator*(const IntMatrix&, const IntMatrix&);
template RatMatrix operator*(const RatMatrix&, const RatMatrix&);
template IntVector operator*(const IntMatrix&, const IntVector&);
template RatVector operator*(const RatMatrix&, const RatVector&);
template IntMatrix kron(const IntMatrix&, const IntMatrix&);
template RatMatrix kron(const RatMatrix&, const RatMatrix&);
template IntMatrix hconcat(const IntMatrix&, const IntMatrix&);
template RatMatrix hconcat(const RatMatrix&, const RatMatrix&);
template IntMatrix vconcat(const IntMatrix&, const IntMatrix&);
template RatMatrix vconcat(const RatMatrix&, const RatMatrix&);
template std::ostream& operator<<(std::ostream&, const IntMatrix&);
template std::ostream& operator<<(std::ostream&, const RatMatrix&);

RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
  return r;
}

bool is_integral(const RatMatrix& m) {
  return std::all_of(m.entries().begin(), m.entries().end(),
                     [](const mpq_class& x) { return x.get_den() == 1; });
}

IntMatrix to_integer(const RatMatrix& m) {
  IntMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j).get_den() != 1) throw Error(Errc::NotIntegral, "matrix entry is not an integer");
      r(i, j) = m(i, j).get_num();
    }
  return r;
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

class SmithWorker {
 public:
  SmithWorker(const IntMatrix& a, SmithOptions opts) : a_(a), opts_(opts) {
    if (opts_.track_left) {
      u_ = IntMatrix::identity(a.rows());
    }
    if (opts_.track_right) v_ = IntMatrix::identity(a.cols());
    if (opts_.track_right_inverse) vinv_ = IntMatrix::identity(a.cols());
  }

  SmithForm run() {
    const std::size_t m = a_.rows(), n = a_.cols();
    std::size_t t = 0;
    for (; t < std::min(m, n); ++t) {
      if (!bring_min_pivot(t)) break;
      for (;;) {
        clear_pivot(t);
        auto bad = find_nondivisible(t);
        if (!bad) break;
        add_row(t, *bad);
      }
      if (a_(t, t) < 0) negate_row(t);
    }
    SmithForm out;
    out.rank = t;
    for (std::size_t i = 0; i < t; ++i) out.diagonal.push_back(a_(i, i));
    out.invariant_factors = out.diagonal;
    out.D = std::move(a_);
    out.U = std::move(u_);
    out.V = std::move(v_);
    out.V_inv = std::move(vinv_);
    return out;
  }

 private:
  bool bring_min_pivot(std::size_t t) {
    std::size_t bi = 0, bj = 0;
    bool found = false;
    for (std::size_t i = t; i < a_.rows(); ++i)
      for (std::size_t j = t; j < a_.cols(); ++j) {
        const mpz_class& x = a_(i, j);
        if (x == 0) continue;
        if (!found || cmpabs(x, a_(bi, bj)) < 0) {
          bi = i;
          bj = j;
          found = true;
          if (abs(x) == 1) goto done;
        }
      }
  done:
    if (!found) return false;
    swap_rows(t, bi);
    swap_cols(t, bj);
    return true;
  }

  void clear_pivot(std::size_t t) {
    for (;;) {
      // column t below the pivot
      std::vector<std::size_t> targets;
      std::vector<mpz_class> factors;
      for (std::size_t i = t + 1; i < a_.rows(); ++i)
        if (a_(i, t) != 0) {
          mpz_class q;
          mpz_tdiv_q(q.get_mpz_t(), a_(i, t).get_mpz_t(), a_(t, t).get_mpz_t());
          targets.push_back(i);
          factors.push_back(q);
        }
      row_ops(t, targets, factors);
      if (auto r = min_in_column(t)) {
        swap_rows(t, *r);
        continue;
      }
      // row t right of the pivot
      targets.clear();
      factors.clear();
      for (std::size_t j = t + 1; j < a_.cols(); ++j)
        if (a_(t, j) != 0) {
          mpz_class q;
          mpz_tdiv_q(q.get_mpz_t(), a_(t, j).get_mpz_t(), a_(t, t).get_mpz_t());
          targets.push_back(j);
          factors.push_back(q);
        }
      col_ops(t, targets, factors);
      if (auto c = min_in_row(t)) {
        swap_cols(t, *c);
        continue;
      }
      return;
    }
  }

  std::optional<std::size_t> min_in_column(std::size_t t) const {
    std::optional<std::size_t> best;
    for (std::size_t i = t + 1; i < a_.rows(); ++i)
      if (a_(i, t) != 0 && (!best || cmpabs(a_(i, t), a_(*best, t)) < 0)) best = i;
    return best;
  }

  std::optional<std::size_t> min_in_row(std::size_t t) const {
    std::optional<std::size_t> best;
    for (std::size_t j = t + 1; j < a_.cols(); ++j)
      if (a_(t, j) != 0 && (!best || cmpabs(a_(t, j), a_(t, *best)) < 0)) best = j;
    return best;
  }

  std::optional<std::size_t> find_nondivisible(std::size_t t) const {
    const mpz_class& p = a_(t, t);
    if (abs(p) == 1) return std::nullopt;
    for (std::size_t i = t + 1; i < a_.rows(); ++i)
      for (std::size_t j = t + 1; j < a_.cols(); ++j)
        if (a_(i, j) != 0 && !mpz_divisible_p(a_(i, j).get_mpz_t(), p.get_mpz_t())) return i;
    return std::nullopt;
  }

  void row_ops(std::size_t pivot, const std::vector<std::size_t>& targets,
               const std::vector<mpz_class>& factors) {
    if (targets.empty()) return;
    kernels::row_axpy<mpz_class>(a_, pivot, targets, factors);
    if (opts_.track_left) kernels::row_axpy<mpz_class>(u_, pivot, targets, factors);
  }

  void col_ops(std::size_t pivot, const std::vector<std::size_t>& targets,
               const std::vector<mpz_class>& factors) {
    if (targets.empty()) return;
    kernels::col_axpy<mpz_class>(a_, pivot, targets, factors);
    if (opts_.track_right) kernels::col_axpy<mpz_class>(v_, pivot, targets, factors);
    if (opts_.track_right_inverse) {
      // col_j -= q col_t on the right is undone by row_t += q row_j on the inverse
      auto dst = vinv_.row(pivot);
      for (std::size_t k = 0; k < targets.size(); ++k) {
        auto src = vinv_.row(targets[k]);
        for (std::size_t c = 0; c < vinv_.cols(); ++c)
          if (src[c] != 0) dst[c] += factors[k] * src[c];
      }
    }
  }

  void add_row(std::size_t t, std::size_t i) {
    // row_t += row_i  ==  row_t -= (-1) row_i
    std::vector<std::size_t> targets{t};
    std::vector<mpz_class> factors{-1};
    kernels::serial::row_axpy<mpz_class>(a_, i, targets, factors);
    if (opts_.track_left) kernels::serial::row_axpy<mpz_class>(u_, i, targets, factors);
  }

  void negate_row(std::size_t t) {
    for (auto& x : a_.row(t)) x = -x;
    if (opts_.track_left)
      for (auto& x : u_.row(t)) x = -x;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    a_.swap_rows(a, b);
    if (opts_.track_left) u_.swap_rows(a, b);
  }

  void swap_cols(std::size_t a, std::size_t b) {
    a_.swap_cols(a, b);
    if (opts_.track_right) v_.swap_cols(a, b);
    if (opts_.track_right_inverse) vinv_.swap_rows(a, b);
  }

  IntMatrix a_, u_, v_, vinv_;
  SmithOptions opts_;
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a, SmithOptions opts) {
  return SmithWorker(a, opts).run();
}

mpz_class determinant(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw Error(Errc::DimensionMismatch, "determinant of non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  mpz_class prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t s = k + 1;
      while (s < n && m(s, k) == 0) ++s;
      if (s == n) return 0;
      m.swap_rows(k, s);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class v = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

std::size_t rank(const IntMatrix& a) {
  return smith_normal_form(a, {.track_left = false, .track_right = false}).rank;
}

Rref rref(const RatMatrix& a) {
  Rref out{a, {}};
  RatMatrix& m = out.reduced;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(r, p);
    const mpq_class inv = 1 / m(r, c);
    for (auto& x : m.row(r)) x *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      const mpq_class f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j)
        if (m(r, j) != 0) m(i, j) -= f * m(r, j);
    }
    out.pivots.push_back(c);
    ++r;
  }
  return out;
}

std::size_t rank(const RatMatrix& a) { return rref(a).pivots.size(); }

IntMatrix integer_kernel(const IntMatrix& a) {
  SmithForm s = smith_normal_form(a, {.track_left = false, .track_right = true});
  return s.V.cols_range(s.rank, a.cols() - s.rank);
}

RatMatrix rational_kernel(const RatMatrix& a) {
  Rref r = rref(a);
  const std::size_t n = a.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  RatMatrix k(n, free_cols.size());
  for (std::size_t f = 0; f < free_cols.size(); ++f) {
    k(free_cols[f], f) = 1;
    for (std::size_t i = 0; i < r.pivots.size(); ++i) k(r.pivots[i], f) = -r.reduced(i, free_cols[f]);
  }
  return k;
}

IntMatrix hermite_rows(const IntMatrix& a) {
  IntMatrix m = a;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    for (;;) {
      std::optional<std::size_t> best;
      std::size_t nonzero = 0;
      for (std::size_t i = r; i < m.rows(); ++i)
        if (m(i, c) != 0) {
          ++nonzero;
          if (!best || cmpabs(m(i, c), m(*best, c)) < 0) best = i;
        }
      if (!best) break;
      m.swap_rows(r, *best);
      if (nonzero == 1) break;
      std::vector<std::size_t> targets;
      std::vector<mpz_class> factors;
      for (std::size_t i = r + 1; i < m.rows(); ++i)
        if (m(i, c) != 0) {
          mpz_class q;
          mpz_tdiv_q(q.get_mpz_t(), m(i, c).get_mpz_t(), m(r, c).get_mpz_t());
          targets.push_back(i);
          factors.push_back(q);
        }
      kernels::row_axpy<mpz_class>(m, r, targets, factors);
    }
    if (r >= m.rows() || m(r, c) == 0) continue;
    if (m(r, c) < 0)
      for (auto& x : m.row(r)) x = -x;
    for (std::size_t i = 0; i < r; ++i) {
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), m(i, c).get_mpz_t(), m(r, c).get_mpz_t());
      if (q == 0) continue;
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= q * m(r, j);
    }
    ++r;
  }
  return m.block(0, 0, r, m.cols());
}

IntMatrix lattice_basis(const IntMatrix& gens) {
  if (gens.cols() == 0) return IntMatrix(gens.rows(), 0);
  return hermite_rows(gens.transpose()).transpose();
}

// ---------------------------------------------------------------------------
// Solving

LatticeSolver::LatticeSolver(const IntMatrix& gens, Ring ring)
    : ring_(ring), ambient_(gens.rows()), ngens_(gens.cols()),
      snf_(smith_normal_form(gens, {.track_left = true, .track_right = true})) {}

std::optional<IntVector> LatticeSolver::solve_integer(const IntVector& v) const {
  if (v.size() != ambient_) throw Error(Errc::DimensionMismatch, "lattice solve");
  IntVector w = snf_.U * v;
  IntVector y(ngens_);
  for (std::size_t i = 0; i < ambient_; ++i) {
    if (i < snf_.rank) {
      if (!mpz_divisible_p(w[i].get_mpz_t(), snf_.diagonal[i].get_mpz_t())) return std::nullopt;
      mpz_divexact(y[i].get_mpz_t(), w[i].get_mpz_t(), snf_.diagonal[i].get_mpz_t());
    } else if (w[i] != 0) {
      return std::nullopt;
    }
  }
  return snf_.V * y;
}

std::optional<RatVector> LatticeSolver::solve_rational(const RatVector& v) const {
  if (v.size() != ambient_) throw Error(Errc::DimensionMismatch, "lattice solve");
  RatVector w(ambient_);
  for (std::size_t i = 0; i < ambient_; ++i)
    for (std::size_t j = 0; j < ambient_; ++j)
      if (snf_.U(i, j) != 0 && v[j] != 0) w[i] += snf_.U(i, j) * v[j];
  RatVector y(ngens_);
  for (std::size_t i = 0; i < ambient_; ++i) {
    if (i < snf_.rank)
      y[i] = w[i] / snf_.diagonal[i];
    else if (w[i] != 0)
      return std::nullopt;
  }
  RatVector x(ngens_);
  for (std::size_t i = 0; i < ngens_; ++i)
    for (std::size_t j = 0; j < ngens_; ++j)
      if (snf_.V(i, j) != 0 && y[j] != 0) x[i] += snf_.V(i, j) * y[j];
  return x;
}

bool LatticeSolver::contains(const IntVector& v) const {
  if (ring_ == Ring::Z) return solve_integer(v).has_value();
  RatVector r(v.begin(), v.end());
  return solve_rational(r).has_value();
}

std::optional<IntVector> solve_in_submodule(const IntMatrix& gens, const IntVector& v) {
  return LatticeSolver(gens, Ring::Z).solve_integer(v);
}

std::optional<RatVector> solve_in_span(const IntMatrix& gens, const RatVector& v) {
  return LatticeSolver(gens, Ring::Q).solve_rational(v);
}

std::optional<RatVector> solve_in_span(const RatMatrix& gens, const RatVector& v) {
  if (v.size() != gens.rows()) throw Error(Errc::DimensionMismatch, "span solve");
  RatMatrix aug = hconcat(gens, RatMatrix::column(v));
  Rref r = rref(aug);
  RatVector x(gens.cols());
  for (std::size_t i = 0; i < r.pivots.size(); ++i) {
    if (r.pivots[i] == gens.cols()) return std::nullopt;
    x[r.pivots[i]] = r.reduced(i, gens.cols());
  }
  return x;
}

EchelonBasis::EchelonBasis(RatMatrix row_basis) : rows_(std::move(row_basis)) {
  for (std::size_t i = 0; i < rows_.rows(); ++i) {
    std::size_t p = 0;
    while (p < rows_.cols() && rows_(i, p) == 0) ++p;
    if (p == rows_.cols() || (!pivots_.empty() && p <= pivots_.back()))
      throw Error(Errc::DimensionMismatch, "rows are not in echelon form");
    pivots_.push_back(p);
  }
}

RatVector EchelonBasis::vector(std::size_t k) const {
  auto r = rows_.row(k);
  return RatVector(r.begin(), r.end());
}

std::optional<RatVector> EchelonBasis::coordinates(const RatVector& v) const {
  if (v.size() != ambient()) throw Error(Errc::DimensionMismatch, "echelon coordinates");
  RatVector x(dimension());
  for (std::size_t k = 0; k < dimension(); ++k) {
    mpq_class acc = v[pivots_[k]];
    for (std::size_t l = 0; l < k; ++l)
      if (x[l] != 0) acc -= x[l] * rows_(l, pivots_[k]);
    x[k] = acc / rows_(k, pivots_[k]);
  }
  RatVector check(ambient());
  for (std::size_t k = 0; k < dimension(); ++k) {
    if (x[k] == 0) continue;
    for (std::size_t j = 0; j < ambient(); ++j)
      if (rows_(k, j) != 0) check[j] += x[k] * rows_(k, j);
  }
  if (check != v) return std::nullopt;
  return x;
}

// ---------------------------------------------------------------------------
// FgModule, ModuleMap

FgModule FgModule::from_orders(const std::vector<mpz_class>& orders) {
  IntMatrix d(orders.size(), orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) d(i, i) = orders[i];
  SmithForm s = smith_normal_form(d, {.track_left = false, .track_right = false});
  FgModule m;
  m.free_rank = orders.size() - s.rank;
  for (const auto& f : s.invariant_factors)
    if (f != 1) m.torsion.push_back(f);
  return m;
}

mpz_class FgModule::order(std::size_t g) const {
  return g < torsion.size() ? torsion[g] : mpz_class(0);
}

IntMatrix FgModule::relations() const {
  IntMatrix r(generators(), torsion.size());
  for (std::size_t i = 0; i < torsion.size(); ++i) r(i, i) = torsion[i];
  return r;
}

std::string FgModule::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  if (free_rank > 0) {
    os << "Z";
    if (free_rank > 1) os << "^" << free_rank;
    first = false;
  }
  for (const auto& t : torsion) {
    if (!first) os << " + ";
    os << "Z/" << t;
    first = false;
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const FgModule& m) { return os << m.str(); }

IntVector normalize(const FgModule& m, IntVector x) {
  for (std::size_t g = 0; g < m.torsion.size() && g < x.size(); ++g)
    mpz_fdiv_r(x[g].get_mpz_t(), x[g].get_mpz_t(), m.torsion[g].get_mpz_t());
  return x;
}

ModuleMap::ModuleMap(FgModule source, FgModule target, IntMatrix matrix, Ring ring)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)), ring_(ring) {
  if (matrix_.rows() != target_.generators() || matrix_.cols() != source_.generators())
    throw Error(Errc::DimensionMismatch, "module map matrix does not match generator counts");
  for (std::size_t j = 0; j < source_.torsion.size(); ++j) {
    const mpz_class& d = source_.torsion[j];
    for (std::size_t i = 0; i < target_.generators(); ++i) {
      const mpz_class img = d * matrix_(i, j);
      const mpz_class t = target_.order(i);
      const bool ok = t == 0 ? img == 0 : mpz_divisible_p(img.get_mpz_t(), t.get_mpz_t()) != 0;
      if (!ok) throw Error(Errc::IllDefinedMap, "torsion generator " + std::to_string(j) + " not respected");
    }
  }
  for (std::size_t i = 0; i < target_.torsion.size(); ++i)
    for (std::size_t j = 0; j < matrix_.cols(); ++j)
      mpz_fdiv_r(matrix_(i, j).get_mpz_t(), matrix_(i, j).get_mpz_t(), target_.torsion[i].get_mpz_t());
}

ModuleMap ModuleMap::identity(const FgModule& m, Ring ring) {
  return ModuleMap(m, m, IntMatrix::identity(m.generators()), ring);
}

ModuleMap ModuleMap::zero(const FgModule& source, const FgModule& target, Ring ring) {
  return ModuleMap(source, target, IntMatrix(target.generators(), source.generators()), ring);
}

IntVector ModuleMap::apply(const IntVector& x) const { return normalize(target_, matrix_ * x); }

bool ModuleMap::is_zero() const { return matrix_.is_zero(); }

bool ModuleMap::is_isomorphism() const {
  // kernel lift must sit inside the source relations, image lift must be everything
  LatticeSolver src_rel(source_.relations(), Ring::Z);
  IntMatrix k = kernel_lift(*this);
  for (std::size_t j = 0; j < k.cols(); ++j)
    if (!src_rel.contains(k.col(j))) return false;
  LatticeSolver img(image_lift(*this), Ring::Z);
  for (std::size_t i = 0; i < target_.generators(); ++i) {
    IntVector e(target_.generators());
    e[i] = 1;
    if (!img.contains(e)) return false;
  }
  return true;
}

ModuleMap compose(const ModuleMap& g, const ModuleMap& f) {
  if (!(f.target() == g.source())) throw Error(Errc::DimensionMismatch, "composition of incompatible maps");
  return ModuleMap(f.source(), g.target(), g.matrix() * f.matrix(), f.ring());
}

ModuleMap dual_map(const ModuleMap& f) {
  if (!f.source().is_free() || !f.target().is_free())
    throw Error(Errc::TorsionPresent, "dual of a map between modules with torsion");
  return ModuleMap(f.target(), f.source(), f.matrix().transpose(), f.ring());
}

IntMatrix kernel_lift(const ModuleMap& f) {
  IntMatrix big = hconcat(f.matrix(), f.target().relations());
  IntMatrix k = integer_kernel(big);
  return k.block(0, 0, f.source().generators(), k.cols());
}

IntMatrix image_lift(const ModuleMap& f) { return hconcat(f.matrix(), f.target().relations()); }

bool same_lattice(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows()) return false;
  LatticeSolver sa(a, Ring::Z), sb(b, Ring::Z);
  for (std::size_t j = 0; j < b.cols(); ++j)
    if (!sa.contains(b.col(j))) return false;
  for (std::size_t j = 0; j < a.cols(); ++j)
    if (!sb.contains(a.col(j))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Subquotient

namespace {

IntMatrix rows_range(const IntMatrix& m, std::size_t r0, std::size_t nr) {
  return m.block(r0, 0, nr, m.cols());
}

}  // namespace

Subquotient make_subquotient(const IntMatrix& d_in, const IntMatrix& d_out,
                             const IntMatrix& middle_rel, const IntMatrix& target_rel, Ring ring) {
  const std::size_t n = d_out.cols();
  if (d_in.rows() != n || middle_rel.rows() != n || target_rel.rows() != d_out.rows())
    throw Error(Errc::DimensionMismatch, "subquotient shapes");

  // d_out ∘ d_in must vanish (modulo the target relations)
  IntMatrix comp = d_out * d_in;
  if (target_rel.cols() == 0) {
    if (!comp.is_zero()) throw Error(Errc::CompositionNonzero, "d_out * d_in != 0");
  } else {
    LatticeSolver rel(target_rel, Ring::Z);
    for (std::size_t j = 0; j < comp.cols(); ++j)
      if (!rel.contains(comp.col(j))) throw Error(Errc::CompositionNonzero, "d_out * d_in not in relations");
  }

  Subquotient sq;
  sq.ring_ = ring;
  sq.ambient_ = n;
  sq.out_map_ = d_out;
  sq.target_rel_ = target_rel;
  sq.middle_rel_ = middle_rel;

  IntMatrix basis;      // n x k
  IntMatrix relations;  // k x s
  if (middle_rel.cols() == 0 && target_rel.cols() == 0) {
    sq.fast_ = true;
    SmithForm s = smith_normal_form(
        d_out, {.track_left = false, .track_right = true, .track_right_inverse = true});
    const std::size_t k = n - s.rank;
    basis = s.V.cols_range(s.rank, k);
    sq.kernel_coords_ = rows_range(s.V_inv, s.rank, k);
    sq.image_coords_ = rows_range(s.V_inv, 0, s.rank);
    relations = sq.kernel_coords_ * d_in;
  } else {
    IntMatrix big = hconcat(d_out, target_rel);
    IntMatrix ker = integer_kernel(big);
    basis = lattice_basis(ker.block(0, 0, n, ker.cols()));
    sq.kernel_solver_.emplace(basis, Ring::Z);
    IntMatrix gens = hconcat(d_in, middle_rel);
    relations = IntMatrix(basis.cols(), gens.cols());
    for (std::size_t j = 0; j < gens.cols(); ++j) {
      auto x = sq.kernel_solver_->solve_integer(gens.col(j));
      if (!x) throw Error(Errc::CompositionNonzero, "boundary is not a cycle");
      relations.set_col(j, *x);
    }
  }

  const std::size_t k = basis.cols();
  SmithForm rs = smith_normal_form(relations, {.track_left = true, .track_right = false});
  // U^{-1} gives the new generators in kernel coordinates.
  IntMatrix u_inv = IntMatrix::identity(k);
  {
    SmithForm inv = smith_normal_form(rs.U, {.track_left = true, .track_right = true});
    // U' U V' = I  =>  U^{-1} = V' U'
    u_inv = inv.V * inv.U;
  }
  sq.unimodular_ = rs.U;
  for (std::size_t i = 0; i < k; ++i) {
    const bool bounded = i < rs.rank;
    if (bounded && (ring == Ring::Q || rs.diagonal[i] == 1)) continue;
    sq.kept_.push_back(i);
    sq.orders_.push_back(bounded ? rs.diagonal[i] : mpz_class(0));
  }
  for (const auto& o : sq.orders_)
    if (o != 0) sq.module_.torsion.push_back(o);
    else ++sq.module_.free_rank;

  IntMatrix chosen(k, sq.kept_.size());
  for (std::size_t g = 0; g < sq.kept_.size(); ++g)
    for (std::size_t i = 0; i < k; ++i) chosen(i, g) = u_inv(i, sq.kept_[g]);
  sq.reps_ = basis * chosen;
  if (k == 0) sq.reps_ = IntMatrix(n, 0);
  return sq;
}

bool Subquotient::is_cycle(const IntVector& v) const {
  if (v.size() != ambient_) return false;
  if (fast_) {
    for (std::size_t i = 0; i < image_coords_.rows(); ++i) {
      mpz_class acc = 0;
      for (std::size_t j = 0; j < ambient_; ++j)
        if (image_coords_(i, j) != 0 && v[j] != 0) acc += image_coords_(i, j) * v[j];
      if (acc != 0) return false;
    }
    return true;
  }
  IntVector img = out_map_ * v;
  if (target_rel_.cols() == 0)
    return std::all_of(img.begin(), img.end(), [](const mpz_class& x) { return x == 0; });
  return LatticeSolver(target_rel_, Ring::Z).contains(img);
}

IntVector Subquotient::classify(const IntVector& cycle) const {
  if (!is_cycle(cycle)) throw Error(Errc::NotACycle, "vector is not a cycle");
  IntVector x;
  if (fast_) {
    x = kernel_coords_ * cycle;
  } else {
    auto sol = kernel_solver_->solve_integer(cycle);
    if (!sol) throw Error(Errc::NotACycle, "cycle outside kernel lattice");
    x = *sol;
  }
  IntVector y = unimodular_ * x;
  IntVector out(kept_.size());
  for (std::size_t g = 0; g < kept_.size(); ++g) {
    out[g] = y[kept_[g]];
    if (orders_[g] != 0) mpz_fdiv_r(out[g].get_mpz_t(), out[g].get_mpz_t(), orders_[g].get_mpz_t());
  }
  return out;
}

Subquotient subquotient(const IntMatrix& d_in, const IntMatrix& d_out, Ring ring) {
  const std::size_t n = d_out.cols();
  return make_subquotient(d_in, d_out, IntMatrix(n, 0), IntMatrix(d_out.rows(), 0), ring);
}

Subquotient subquotient(const ModuleMap& d_in, const ModuleMap& d_out) {
  if (!(d_in.target() == d_out.source()))
    throw Error(Errc::DimensionMismatch, "subquotient maps do not share the middle module");
  return make_subquotient(d_in.matrix(), d_out.matrix(), d_out.source().relations(),
                          d_out.target().relations(), d_out.ring());
}

}  // namespace nori
