#include <random>

#include "doctest.h"
#include "nori/kernels.hpp"
#include "nori/linalg.hpp"
#include "oracle/snf_oracle.hpp"

using namespace nori;

namespace {

IntMatrix M(std::vector<std::vector<mpz_class>> rows, std::size_t cols = 0) {
  return IntMatrix::from_rows(rows, cols);
}

oracle::Grid grid(const IntMatrix& m) {
  oracle::Grid g(m.rows(), std::vector<mpz_class>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) g[i][j] = m(i, j);
  return g;
}

IntMatrix random_matrix(std::mt19937& rng, int lo = -9, int hi = 9) {
  std::uniform_int_distribution<int> dim(1, 6), val(lo, hi);
  IntMatrix m(dim(rng), dim(rng));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = val(rng);
  return m;
}

void check_smith(const IntMatrix& a, const SmithForm& s) {
  REQUIRE(s.U * a * s.V == s.D);
  CHECK(abs(determinant(s.U)) == 1);
  CHECK(abs(determinant(s.V)) == 1);
  for (std::size_t i = 0; i < s.D.rows(); ++i)
    for (std::size_t j = 0; j < s.D.cols(); ++j)
      if (i != j) CHECK(s.D(i, j) == 0);
  for (std::size_t i = 0; i + 1 < s.rank; ++i)
    CHECK(mpz_divisible_p(s.diagonal[i + 1].get_mpz_t(), s.diagonal[i].get_mpz_t()));
  for (std::size_t i = s.rank; i < std::min(a.rows(), a.cols()); ++i) CHECK(s.D(i, i) == 0);
}

}  // namespace

TEST_CASE("smith normal form of diag(2,3)") {
  IntMatrix a = M({{2, 0}, {0, 3}});
  SmithForm s = smith_normal_form(a);
  check_smith(a, s);
  CHECK(s.invariant_factors == std::vector<mpz_class>{1, 6});
  CHECK(oracle::naive_invariant_factors(grid(a)) == std::vector<mpz_class>{1, 6});
  CHECK(oracle::minors_invariant_factors(grid(a)) == std::vector<mpz_class>{1, 6});
}

TEST_CASE("smith normal form of identity and zero") {
  SmithForm id = smith_normal_form(IntMatrix::identity(3));
  CHECK(id.D == IntMatrix::identity(3));
  CHECK(id.invariant_factors == std::vector<mpz_class>{1, 1, 1});
  SmithForm z = smith_normal_form(IntMatrix(2, 2));
  CHECK(z.D.is_zero());
  CHECK(z.invariant_factors.empty());
  SmithForm empty = smith_normal_form(IntMatrix(0, 3));
  CHECK(empty.rank == 0);
  CHECK(empty.V == IntMatrix::identity(3));
}

TEST_CASE("smith normal form agrees with both oracles on random matrices") {
  std::mt19937 rng(20261016);
  for (int trial = 0; trial < 300; ++trial) {
    IntMatrix a = random_matrix(rng, -5, 5);
    SmithForm s = smith_normal_form(a, {.track_right_inverse = true});
    check_smith(a, s);
    CHECK(s.V * s.V_inv == IntMatrix::identity(a.cols()));
    auto naive = oracle::naive_invariant_factors(grid(a));
    CHECK(s.invariant_factors == naive);
    if (a.rows() <= 4 && a.cols() <= 4) CHECK(s.invariant_factors == oracle::minors_invariant_factors(grid(a)));
  }
}

TEST_CASE("entry growth stays exact") {
  // Powers of a unimodular matrix have huge entries; SNF must still be the identity.
  IntMatrix g = M({{2, 1, 0}, {1, 1, 1}, {0, 1, 3}});
  IntMatrix p = IntMatrix::identity(3);
  for (int i = 0; i < 40; ++i) p = p * g;
  SmithForm s = smith_normal_form(p);
  check_smith(p, s);
  CHECK(abs(p(0, 0)) > mpz_class("100000000000000000000"));
  mpz_class prod = 1;
  for (const auto& d : s.invariant_factors) prod *= d;
  CHECK(prod == abs(determinant(p)));
}

TEST_CASE("subquotient examples") {
  SUBCASE("zero maps on Z^2") {
    Subquotient h = subquotient(IntMatrix(2, 0), IntMatrix(0, 2), Ring::Z);
    CHECK(h.module() == FgModule::free(2));
  }
  SUBCASE("Z -> Z^2 by (2,0)") {
    Subquotient h = subquotient(M({{2}, {0}}), IntMatrix(0, 2), Ring::Z);
    CHECK(h.module().free_rank == 1);
    CHECK(h.module().torsion == std::vector<mpz_class>{2});
    CHECK(h.classify({1, 0}) == IntVector{1, 0});
    CHECK(h.classify({2, 0}) == IntVector{0, 0});
    CHECK(h.classify({0, 1}) == IntVector{0, 1});
    // oracle: SNF of the relation matrix
    CHECK(smith_normal_form(M({{2}, {0}})).invariant_factors == std::vector<mpz_class>{2});
    Subquotient q = subquotient(M({{2}, {0}}), IntMatrix(0, 2), Ring::Q);
    CHECK(q.module() == FgModule::free(1));
  }
  SUBCASE("surjective d_in kills everything") {
    Subquotient h = subquotient(M({{1, 0}, {3, 1}}), M({{0, 0}}), Ring::Z);
    CHECK(h.module().is_zero());
  }
  SUBCASE("composition must vanish") {
    CHECK_THROWS_AS(subquotient(M({{1}, {0}}), M({{1, 0}}), Ring::Z), Error);
  }
}

TEST_CASE("subquotient over presented modules matches brute-force enumeration mod p") {
  // middle module Z/p^a ⊕ ..., maps random; count elements of ker/im by enumeration.
  std::mt19937 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const int p = trial % 2 ? 3 : 2;
    std::uniform_int_distribution<int> dim(1, 2), val(0, p - 1);
    const std::size_t a = dim(rng), m = dim(rng), b = dim(rng);
    FgModule A{0, std::vector<mpz_class>(a, p)}, Mid{0, std::vector<mpz_class>(m, p)},
        B{0, std::vector<mpz_class>(b, p)};
    IntMatrix g(b, m);
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = 0; j < m; ++j) g(i, j) = val(rng);
    // f: A -> Mid landing in ker g: pick random combination of kernel vectors (brute force)
    std::vector<IntVector> kernel;
    std::size_t total = 1;
    for (std::size_t i = 0; i < m; ++i) total *= p;
    for (std::size_t code = 0; code < total; ++code) {
      IntVector x(m);
      std::size_t c = code;
      for (std::size_t i = 0; i < m; ++i) { x[i] = c % p; c /= p; }
      IntVector y = g * x;
      bool zero = true;
      for (auto& v : y) if (v % p != 0) zero = false;
      if (zero) kernel.push_back(x);
    }
    IntMatrix f(m, a);
    std::uniform_int_distribution<std::size_t> pick(0, kernel.size() - 1);
    for (std::size_t j = 0; j < a; ++j) f.set_col(j, kernel[pick(rng)]);
    ModuleMap fin(A, Mid, f), gout(Mid, B, g);
    Subquotient h = subquotient(fin, gout);
    // brute force: |ker| / |im|
    std::size_t img_count = 0;
    std::size_t atotal = 1;
    for (std::size_t i = 0; i < a; ++i) atotal *= p;
    std::vector<IntVector> images;
    for (std::size_t code = 0; code < atotal; ++code) {
      IntVector x(a);
      std::size_t c = code;
      for (std::size_t i = 0; i < a; ++i) { x[i] = c % p; c /= p; }
      IntVector y = normalize(Mid, f * x);
      if (std::find(images.begin(), images.end(), y) == images.end()) images.push_back(y);
    }
    img_count = images.size();
    mpz_class order = 1;
    for (auto& t : h.module().torsion) order *= t;
    CHECK(h.module().free_rank == 0);
    CHECK(order * img_count == kernel.size());
  }
}

TEST_CASE("solve_in_submodule") {
  IntMatrix two = M({{2, 0}, {0, 2}});
  CHECK(*solve_in_submodule(two, {2, 4}) == IntVector{1, 2});
  CHECK(*solve_in_submodule(two, {0, 0}) == IntVector{0, 0});
  CHECK_FALSE(solve_in_submodule(two, {1, 0}).has_value());
  auto q = solve_in_span(two, RatVector{1, 0});
  REQUIRE(q.has_value());
  CHECK((*q)[0] == mpq_class(1, 2));
  CHECK((*q)[1] == 0);
}

TEST_CASE("dual_map is a contravariant functor") {
  FgModule z2 = FgModule::free(2);
  ModuleMap f(z2, z2, M({{1, 2}, {3, 4}}));
  CHECK(dual_map(f).matrix() == M({{1, 3}, {2, 4}}));
  CHECK(dual_map(ModuleMap::identity(z2)) == ModuleMap::identity(z2));
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> val(-9, 9);
  FgModule z3 = FgModule::free(3);
  for (int t = 0; t < 20; ++t) {
    IntMatrix a(3, 3), b(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) { a(i, j) = val(rng); b(i, j) = val(rng); }
    ModuleMap fa(z3, z3, a), gb(z3, z3, b);
    CHECK(dual_map(compose(gb, fa)) == compose(dual_map(fa), dual_map(gb)));
  }
  FgModule tors{0, {2}};
  CHECK_THROWS_AS(dual_map(ModuleMap::identity(tors)), Error);
}

TEST_CASE("module maps check well-definedness on torsion") {
  FgModule z2{0, {2}}, z4{0, {4}}, z{1, {}};
  CHECK_NOTHROW(ModuleMap(z2, z4, M({{2}})));
  CHECK_THROWS_AS(ModuleMap(z2, z4, M({{1}})), Error);
  CHECK_THROWS_AS(ModuleMap(z2, z, M({{1}})), Error);
  CHECK(ModuleMap(z4, z2, M({{3}})).matrix() == M({{1}}));
  CHECK(ModuleMap(z, z2, M({{1}})).is_isomorphism() == false);
  CHECK(ModuleMap(z2, z2, M({{1}})).is_isomorphism());
  CHECK(FgModule::from_orders({2, 3, 0}) == FgModule{1, {6}});
}

TEST_CASE("hermite and echelon bases") {
  IntMatrix h = hermite_rows(M({{2, 4, 6}, {1, 1, 1}, {3, 5, 7}}));
  CHECK(h == M({{1, 1, 1}, {0, 2, 4}}));
  EchelonBasis e(to_rational(h));
  auto c = e.coordinates(RatVector{3, 7, 11});
  REQUIRE(c.has_value());
  CHECK(*c == RatVector{3, 2});
  CHECK_FALSE(e.coordinates(RatVector{0, 0, 1}).has_value());
}

TEST_CASE("serial and OpenMP kernels agree") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> val(-50, 50);
  IntMatrix a(60, 70), b(70, 40);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = val(rng);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) = val(rng);
  CHECK(kernels::serial::multiply(a, b) == kernels::parallel::multiply(a, b));

  std::vector<std::size_t> targets;
  std::vector<mpz_class> factors;
  for (std::size_t i = 1; i < a.rows(); i += 2) { targets.push_back(i); factors.push_back(val(rng)); }
  IntMatrix s = a, p = a;
  kernels::serial::row_axpy<mpz_class>(s, 0, targets, factors);
  kernels::parallel::row_axpy<mpz_class>(p, 0, targets, factors);
  CHECK(s == p);
  std::vector<std::size_t> ctargets{1, 5, 9};
  std::vector<mpz_class> cf{3, -2, 7};
  kernels::serial::col_axpy<mpz_class>(s, 0, ctargets, cf);
  kernels::parallel::col_axpy<mpz_class>(p, 0, ctargets, cf);
  CHECK(s == p);

  std::vector<IntMatrix> batch;
  for (int i = 0; i < 50; ++i) batch.push_back(random_matrix(rng));
  auto sa = kernels::smith_batch_serial(batch);
  auto pa = kernels::smith_batch_parallel(batch);
  for (std::size_t i = 0; i < batch.size(); ++i) CHECK(sa[i].D == pa[i].D);
}
