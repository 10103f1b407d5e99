#pragma once

// Exact integer and rational matrix algebra.
//
// Everything downstream (homology, commutants, coalgebras) is built on the
// routines here.  Entries are GMP integers/rationals; nothing ever overflows.

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "nori/error.hpp"

namespace nori {

enum class Ring { Z, Q };

std::string to_string(Ring ring);
Ring parse_ring(const std::string& text);

template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> entries);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<T>>& rows, std::size_t cols_if_empty = 0);
  static Matrix column(const std::vector<T>& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::vector<T> col(std::size_t j) const;
  void set_col(std::size_t j, const std::vector<T>& v);

  const std::vector<T>& entries() const { return data_; }

  Matrix transpose() const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  Matrix cols_range(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }
  bool is_zero() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(const T& s);

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<mpz_class>;
using RatMatrix = Matrix<mpq_class>;
using IntVector = std::vector<mpz_class>;
using RatVector = std::vector<mpq_class>;

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b);
template <class T>
std::vector<T> operator*(const Matrix<T>& a, const std::vector<T>& v);
template <class T>
Matrix<T> operator+(Matrix<T> a, const Matrix<T>& b) { return a += b; }
template <class T>
Matrix<T> operator-(Matrix<T> a, const Matrix<T>& b) { return a -= b; }

/// Kronecker product; row index of (a ⊗ b) is i_a * b.rows() + i_b.
template <class T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b);

/// Block diagonal / horizontal / vertical concatenation.
template <class T>
Matrix<T> hconcat(const Matrix<T>& a, const Matrix<T>& b);
template <class T>
Matrix<T> vconcat(const Matrix<T>& a, const Matrix<T>& b);

RatMatrix to_rational(const IntMatrix& m);
/// Throws NotIntegral when some entry has a nontrivial denominator.
IntMatrix to_integer(const RatMatrix& m);
bool is_integral(const RatMatrix& m);

template <class T>
std::ostream& operator<<(std::ostream& os, const Matrix<T>& m);

// ---------------------------------------------------------------------------
// Smith normal form

struct SmithForm {
  IntMatrix U;      // rows x rows, unimodular
  IntMatrix D;      // rows x cols, diagonal
  IntMatrix V;      // cols x cols, unimodular
  IntMatrix V_inv;  // inverse of V, kept so kernel coordinates are a product
  std::vector<mpz_class> diagonal;          // first `rank` diagonal entries
  std::vector<mpz_class> invariant_factors; // == diagonal (nonzero, d1 | d2 | ...)
  std::size_t rank = 0;
};

struct SmithOptions {
  bool track_left = true;
  bool track_right = true;
  bool track_right_inverse = false;
};

/// U·A·V = D with |det U| = |det V| = 1 and a divisibility chain on diag(D).
/// Pivots are chosen by smallest nonzero absolute value.
SmithForm smith_normal_form(const IntMatrix& a, SmithOptions opts = {});

mpz_class determinant(const IntMatrix& a);  // Bareiss, square input
std::size_t rank(const IntMatrix& a);
std::size_t rank(const RatMatrix& a);

// ---------------------------------------------------------------------------
// Lattices, kernels, echelon forms

/// Basis (columns) of {x : A x = 0} in Z^cols; the basis spans a saturated lattice.
IntMatrix integer_kernel(const IntMatrix& a);
/// Basis (columns) of the rational kernel, read off the reduced row echelon form.
RatMatrix rational_kernel(const RatMatrix& a);

struct Rref {
  RatMatrix reduced;
  std::vector<std::size_t> pivots;
};
Rref rref(const RatMatrix& a);

/// Hermite normal form of the row lattice: echelon rows, positive pivots,
/// entries above each pivot reduced into [0, pivot).  Zero rows dropped.
IntMatrix hermite_rows(const IntMatrix& a);

/// A basis (columns) of the lattice spanned by the columns of `gens`.
IntMatrix lattice_basis(const IntMatrix& gens);

/// Solves gens·c = v.  Over Z this is lattice membership; over Q span membership.
class LatticeSolver {
 public:
  LatticeSolver(const IntMatrix& gens, Ring ring);
  std::optional<IntVector> solve_integer(const IntVector& v) const;
  std::optional<RatVector> solve_rational(const RatVector& v) const;
  bool contains(const IntVector& v) const;
  std::size_t ambient() const { return ambient_; }
  std::size_t generators() const { return ngens_; }

 private:
  Ring ring_;
  std::size_t ambient_ = 0;
  std::size_t ngens_ = 0;
  SmithForm snf_;
};

std::optional<IntVector> solve_in_submodule(const IntMatrix& gens, const IntVector& v);
std::optional<RatVector> solve_in_span(const IntMatrix& gens, const RatVector& v);
std::optional<RatVector> solve_in_span(const RatMatrix& gens, const RatVector& v);

/// Column echelon basis of a rational subspace with coordinates by forward
/// substitution on pivot positions.  Used for canonical algebra bases.
class EchelonBasis {
 public:
  EchelonBasis() = default;
  /// Rows of `row_basis` must be linearly independent and in echelon form.
  explicit EchelonBasis(RatMatrix row_basis);
  std::size_t dimension() const { return rows_.rows(); }
  std::size_t ambient() const { return rows_.cols(); }
  const RatMatrix& rows() const { return rows_; }
  RatVector vector(std::size_t k) const;
  std::optional<RatVector> coordinates(const RatVector& v) const;

 private:
  RatMatrix rows_;
  std::vector<std::size_t> pivots_;
};

// ---------------------------------------------------------------------------
// Finitely generated modules

/// Z^free_rank ⊕ Z/t1 ⊕ ... ⊕ Z/tk with t1 | t2 | ... | tk and every ti > 1.
/// Generators are ordered torsion first, then free.
struct FgModule {
  std::size_t free_rank = 0;
  std::vector<mpz_class> torsion;

  static FgModule free(std::size_t rank) { return FgModule{rank, {}}; }
  /// Normalizes an arbitrary list of cyclic orders (0 = free) via SNF.
  static FgModule from_orders(const std::vector<mpz_class>& orders);

  std::size_t generators() const { return torsion.size() + free_rank; }
  bool is_free() const { return torsion.empty(); }
  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  /// Order of generator g; 0 for free generators.
  mpz_class order(std::size_t g) const;
  /// Relation matrix: generators x torsion.size(), diagonal orders.
  IntMatrix relations() const;

  std::string str() const;
  friend bool operator==(const FgModule& a, const FgModule& b) {
    return a.free_rank == b.free_rank && a.torsion == b.torsion;
  }
};

std::ostream& operator<<(std::ostream& os, const FgModule& m);

/// A homomorphism between presented modules.  The matrix acts on generator
/// coordinates; rows belonging to torsion generators are reduced into
/// [0, order).  Well-definedness is checked on construction.
class ModuleMap {
 public:
  ModuleMap() = default;
  ModuleMap(FgModule source, FgModule target, IntMatrix matrix, Ring ring = Ring::Z);

  static ModuleMap identity(const FgModule& m, Ring ring = Ring::Z);
  static ModuleMap zero(const FgModule& source, const FgModule& target, Ring ring = Ring::Z);

  const FgModule& source() const { return source_; }
  const FgModule& target() const { return target_; }
  const IntMatrix& matrix() const { return matrix_; }
  Ring ring() const { return ring_; }

  IntVector apply(const IntVector& x) const;
  bool is_zero() const;
  bool is_isomorphism() const;

  friend bool operator==(const ModuleMap& a, const ModuleMap& b) {
    return a.source_ == b.source_ && a.target_ == b.target_ && a.matrix_ == b.matrix_;
  }

 private:
  FgModule source_;
  FgModule target_;
  IntMatrix matrix_;
  Ring ring_ = Ring::Z;
};

/// g ∘ f
ModuleMap compose(const ModuleMap& g, const ModuleMap& f);
/// Transpose in dual bases; both modules must be free.
ModuleMap dual_map(const ModuleMap& f);

/// Reduces a coordinate vector of `m` (torsion coordinates mod their order).
IntVector normalize(const FgModule& m, IntVector x);

/// Generators of the preimage of the target's relations, i.e. a lift of ker f
/// to Z^gens(source); includes the source relations.
IntMatrix kernel_lift(const ModuleMap& f);
/// Columns of f together with the target relations: a lift of im f.
IntMatrix image_lift(const ModuleMap& f);
/// True when the lattices spanned by the columns of a and b coincide.
bool same_lattice(const IntMatrix& a, const IntMatrix& b);

// ---------------------------------------------------------------------------
// Subquotients

/// ker(d_out) / im(d_in) inside a presented middle module, with the data
/// needed to turn cycles into class coordinates.
class Subquotient {
 public:
  const FgModule& module() const { return module_; }
  Ring ring() const { return ring_; }
  std::size_t ambient() const { return ambient_; }
  /// Column g is a cycle representing generator g.
  const IntMatrix& representatives() const { return reps_; }
  IntVector representative(std::size_t g) const { return reps_.col(g); }
  /// Class coordinates of a cycle (throws NotACycle otherwise).
  IntVector classify(const IntVector& cycle) const;
  bool is_cycle(const IntVector& v) const;

 private:
  friend Subquotient make_subquotient(const IntMatrix&, const IntMatrix&, const IntMatrix&,
                                      const IntMatrix&, Ring);
  FgModule module_;
  Ring ring_ = Ring::Z;
  std::size_t ambient_ = 0;
  IntMatrix reps_;
  // Free fast path: kernel basis = V[:, r:], coordinates via V^{-1}.
  bool fast_ = false;
  IntMatrix kernel_coords_;  // (k x ambient) rows of V^{-1} belonging to the kernel
  IntMatrix image_coords_;   // (r x ambient) rows of V^{-1} that must vanish on cycles
  // General path.
  std::optional<LatticeSolver> kernel_solver_;
  IntMatrix out_map_;        // d_out, for cycle checks
  IntMatrix target_rel_;
  IntMatrix middle_rel_;
  IntMatrix unimodular_;     // U from the SNF of the relations in kernel coordinates
  std::vector<std::size_t> kept_;
  std::vector<mpz_class> orders_;
};

/// General form: middle module Z^n / middle_rel, target Z^m / target_rel.
/// d_in: (n x p), d_out: (m x n).  Requires d_out·d_in ≡ 0 mod target_rel.
Subquotient make_subquotient(const IntMatrix& d_in, const IntMatrix& d_out,
                             const IntMatrix& middle_rel, const IntMatrix& target_rel,
                             Ring ring);

/// Chain-level form over free modules.
Subquotient subquotient(const IntMatrix& d_in, const IntMatrix& d_out, Ring ring);
/// Module-map form: d_in: A -> M, d_out: M -> B.
Subquotient subquotient(const ModuleMap& d_in, const ModuleMap& d_out);

}  // namespace nori
