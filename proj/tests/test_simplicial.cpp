#include <doctest.h>

#include <random>

#include "nori/catalog.hpp"
#include "nori/simplicial.hpp"
#include "oracle/homology_oracle.hpp"

using namespace nori;

namespace {

SimplicialComplex cx(const std::vector<Simplex>& f) { return SimplicialComplex::from_maximal(f); }

// Library homology against the brute-force oracle, every degree up to dim X.
void check_against_oracle(const std::vector<Simplex>& x, const std::vector<Simplex>& z = {}) {
  SimplicialPair p(cx(x), cx(z));
  RelativeHomology h(p, Ring::Z);
  auto o = oracle::homology(oracle::chains(x, z));
  for (int n = 0; n <= p.X.dimension(); ++n) {
    const FgModule m = h.module(n);
    const std::size_t betti = n < static_cast<int>(o.betti.size()) ? o.betti[n] : 0;
    CHECK(m.free_rank == betti);
    for (const auto& [prime, counts] : o.torsion) {
      std::size_t t = 0;
      for (const auto& d : m.torsion)
        if (mpz_divisible_ui_p(d.get_mpz_t(), prime)) ++t;
      CHECK(t == (n < static_cast<int>(counts.size()) ? counts[n] : 0));
    }
  }
}

FgModule hz(const std::string& name, int n) {
  return relative_homology(SimplicialPair::absolute(catalog::space(name)), n, Ring::Z);
}

FgModule mod(std::size_t free, std::vector<long> torsion = {}) {
  FgModule m;
  m.free_rank = free;
  for (long t : torsion) m.torsion.push_back(t);
  return m;
}

}  // namespace

TEST_CASE("relative chain complex ranks") {
  auto pt = relative_chain_complex(SimplicialPair::absolute(catalog::space("point")), Ring::Z);
  CHECK(pt.rank(0) == 1);
  CHECK(pt.rank(1) == 0);

  auto edge = relative_chain_complex({catalog::space("interval"), cx({{0}, {1}})}, Ring::Z);
  CHECK(edge.rank(0) == 0);
  CHECK(edge.rank(1) == 1);
  CHECK(edge.boundary(1).rows() == 0);

  auto circ = relative_chain_complex({catalog::space("circle"), cx({{0}})}, Ring::Z);
  CHECK(circ.rank(0) == 2);
  CHECK(circ.rank(1) == 3);

  CHECK_THROWS_AS(SimplicialPair(catalog::space("interval"), cx({{2}})), Error);
  try {
    SimplicialPair(catalog::space("interval"), cx({{0, 2}}));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidPair);
  }
}

TEST_CASE("from_simplices rejects lists that are not closed") {
  CHECK_THROWS_AS(SimplicialComplex::from_simplices({{0, 1}}), Error);
  auto c = SimplicialComplex::from_simplices({{0}, {1}, {0, 1}});
  CHECK(c == catalog::space("interval"));
}

TEST_CASE("golden homology over Z") {
  CHECK(hz("point", 0) == mod(1));
  CHECK(hz("circle", 0) == mod(1));
  CHECK(hz("circle", 1) == mod(1));
  CHECK(hz("sphere", 1) == mod(0));
  CHECK(hz("sphere", 2) == mod(1));
  CHECK(hz("torus", 1) == mod(2));
  CHECK(hz("torus", 2) == mod(1));
  CHECK(hz("rp2", 0) == mod(1));
  CHECK(hz("rp2", 1) == mod(0, {2}));
  CHECK(hz("rp2", 2) == mod(0));
  CHECK(hz("klein", 1) == mod(1, {2}));
  CHECK(hz("klein", 2) == mod(0));
  CHECK(hz("moebius", 1) == mod(1));
  for (const auto& name : catalog::names()) check_against_oracle(catalog::facets(name));
}

TEST_CASE("relative homology against the oracle") {
  check_against_oracle(catalog::facets("moebius"), {{0, 2}, {2, 4}, {1, 4}, {1, 3}, {0, 3}});
  check_against_oracle(catalog::facets("torus"), {{0, 1}, {1, 2}, {0, 2}});
  check_against_oracle(catalog::facets("rp2"), {{0, 1, 2}});
  check_against_oracle(catalog::facets("sphere"), {{0, 1}, {2}});
  check_against_oracle(catalog::facets("klein"), {{0, 3, 4}, {5}});
}

TEST_CASE("circle with a point") {
  SimplicialPair p(catalog::space("circle"), cx({{0}}));
  CHECK(relative_homology(p, 1, Ring::Z) == mod(1));
  CHECK(relative_homology(p, 0, Ring::Z).is_zero());
  CHECK(relative_homology(p, 1, Ring::Q) == mod(1));
}

TEST_CASE("h(X, X) vanishes and the empty complex is allowed") {
  for (const auto& name : {"torus", "rp2", "sphere"}) {
    auto x = catalog::space(name);
    for (int n = 0; n <= 3; ++n) CHECK(relative_homology({x, x}, n, Ring::Z).is_zero());
  }
  SimplicialComplex none;
  CHECK(relative_homology({none, none}, 0, Ring::Z).is_zero());
}

TEST_CASE("rational homology drops torsion") {
  auto h = RelativeHomology(SimplicialPair::absolute(catalog::space("rp2")), Ring::Q);
  CHECK(h.module(1).is_zero());
  auto k = RelativeHomology(SimplicialPair::absolute(catalog::space("klein")), Ring::Q);
  CHECK(k.module(1) == mod(1));
}

TEST_CASE("induced maps") {
  auto circle = catalog::space("circle");
  auto pair = SimplicialPair::absolute(circle);

  auto id = induced_map_on_homology(SimplicialMap::identity(circle), pair, pair, 1, Ring::Z);
  CHECK(id == ModuleMap::identity(mod(1)));

  auto pt = catalog::space("point");
  SimplicialMap collapse(circle, pt, {{0, 0}, {1, 0}, {2, 0}});
  auto z = induced_map_on_homology(collapse, pair, SimplicialPair::absolute(pt), 1, Ring::Z);
  CHECK(z.is_zero());

  auto hex = catalog::space("hexagon");
  SimplicialMap wrap(hex, circle, {{0, 0}, {1, 1}, {2, 2}, {3, 0}, {4, 1}, {5, 2}});
  auto twice = induced_map_on_homology(wrap, SimplicialPair::absolute(hex), pair, 1, Ring::Z);
  CHECK(abs(twice.matrix()(0, 0)) == 2);

  // functoriality: hexagon -> circle -> circle (reflection)
  SimplicialMap flip(circle, circle, {{0, 0}, {1, 2}, {2, 1}});
  RelativeHomology hh(SimplicialPair::absolute(hex), Ring::Z), hc(pair, Ring::Z);
  for (int n = 0; n <= 1; ++n) {
    auto lhs = induced_map(compose(flip, wrap), hh, hc, n);
    auto rhs = compose(induced_map(flip, hc, hc, n), induced_map(wrap, hh, hc, n));
    CHECK(lhs == rhs);
  }
  CHECK(induced_map(flip, hc, hc, 1).matrix()(0, 0) == -1);

  // pair map that does not respect Z
  SimplicialPair with_pt(circle, cx({{0}}));
  SimplicialPair other_pt(circle, cx({{1}}));
  try {
    induced_map_on_homology(SimplicialMap::identity(circle), with_pt, other_pt, 1, Ring::Z);
    FAIL("expected NotPairMap");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotPairMap);
  }
}

TEST_CASE("induced maps see torsion") {
  // RP^2 -> RP^2 identity on h_1 = Z/2
  auto x = catalog::space("rp2");
  auto p = SimplicialPair::absolute(x);
  auto m = induced_map_on_homology(SimplicialMap::identity(x), p, p, 1, Ring::Z);
  CHECK(m.source() == mod(0, {2}));
  CHECK(m.matrix()(0, 0) == 1);
}

TEST_CASE("triple boundary") {
  auto x = catalog::space("interval");
  auto z = cx({{0}, {1}});
  auto w = cx({{0}});
  auto d = triple_boundary(x, z, w, 1, Ring::Z);
  CHECK(d.source() == mod(1));
  CHECK(d.target() == mod(1));
  CHECK(abs(d.matrix()(0, 0)) == 1);
  CHECK(d.is_isomorphism());

  CHECK(triple_boundary(x, z, z, 1, Ring::Z).is_zero());
  CHECK_THROWS_AS(triple_boundary(x, w, z, 1, Ring::Z), Error);

  // consecutive boundaries through the skeleta of a tetrahedron compose to zero
  auto t = catalog::space("sphere");
  for (const auto& base : {catalog::space("tetrahedron"), t, catalog::space("torus")}) {
    auto s2 = base.skeleton(2), s1 = base.skeleton(1), s0 = base.skeleton(0);
    SimplicialComplex none;
    RelativeHomology a({s2, s1}, Ring::Z), b({s1, s0}, Ring::Z), c({s0, none}, Ring::Z);
    auto d2 = triple_boundary(a, b, 2);
    auto d1 = triple_boundary(b, c, 1);
    CHECK(compose(d1, d2).is_zero());
  }
}

TEST_CASE("long exact sequence") {
  auto circle = catalog::space("circle");
  CHECK(les_exactness({circle, cx({{0}})}).exact());
  CHECK(les_exactness(SimplicialPair::absolute(catalog::space("torus"))).exact());
  CHECK(les_exactness({catalog::space("rp2"), cx({{0, 1}, {1, 2}, {0, 2}})}).exact());
  CHECK(les_exactness({catalog::space("klein"), cx({{0, 1}, {1, 2}, {0, 2}})}).exact());

  auto mob = catalog::space("moebius");
  auto rim = cx({{0, 2}, {2, 4}, {1, 4}, {1, 3}, {0, 3}});
  auto cert = les_exactness({mob, rim});
  CHECK(cert.exact());
  auto incl = induced_map_on_homology(SimplicialMap::inclusion(rim, mob), SimplicialPair::absolute(rim),
                                      SimplicialPair::absolute(mob), 1, Ring::Z);
  CHECK(abs(incl.matrix()(0, 0)) == 2);
  CHECK(relative_homology({mob, rim}, 1, Ring::Z) == mod(0, {2}));

  // a broken sequence is detected
  auto f = ModuleMap(mod(1), mod(1), IntMatrix::from_rows({{2}}));
  auto g = ModuleMap(mod(1), mod(0, {2}), IntMatrix::from_rows({{1}}));
  auto node = exactness_at(f, g);
  CHECK(node.exact_z);
  auto g_bad = ModuleMap::zero(mod(1), mod(0, {2}));
  CHECK_FALSE(exactness_at(f, g_bad).exact_z);
  CHECK(exactness_at(f, g_bad).exact_q);
}

TEST_CASE("products") {
  auto pt = SimplicialPair::absolute(catalog::space("point"));
  auto mob = SimplicialPair::absolute(catalog::space("moebius"));
  auto prod = product_pair(pt, mob);
  for (int d = 0; d <= 2; ++d) CHECK(prod.pair.X.count(d) == mob.X.count(d));

  auto edge = SimplicialPair::absolute(catalog::space("interval"));
  auto square = product_pair(edge, edge);
  CHECK(square.pair.X.count(0) == 4);
  CHECK(square.pair.X.count(1) == 5);
  CHECK(square.pair.X.count(2) == 2);

  auto circle = SimplicialPair::absolute(catalog::space("circle"));
  auto torus = product_pair(circle, circle);
  CHECK(torus.pair.X.count(2) == 18);
  RelativeHomology h(torus.pair, Ring::Q);
  CHECK(h.module(0) == mod(1));
  CHECK(h.module(1) == mod(2));
  CHECK(h.module(2) == mod(1));

  // relative product: (I, ∂I) x (I, ∂I) is a square relative to its boundary
  SimplicialPair rel(catalog::space("interval"), cx({{0}, {1}}));
  auto sq = product_pair(rel, rel);
  CHECK(relative_homology(sq.pair, 2, Ring::Z) == mod(1));
  CHECK(relative_homology(sq.pair, 1, Ring::Z).is_zero());

  // oracle on the product complex
  check_against_oracle(torus.pair.X.simplices(2));
}

TEST_CASE("Eilenberg-Zilber and Alexander-Whitney") {
  auto edge = SimplicialPair::absolute(catalog::space("interval"));
  auto circle = SimplicialPair::absolute(catalog::space("circle"));
  SimplicialPair rel(catalog::space("interval"), cx({{0}, {1}}));
  SimplicialPair circ_pt(catalog::space("circle"), cx({{0}}));
  auto triangle = SimplicialPair::absolute(catalog::space("triangle"));

  for (auto [a, b] : std::vector<std::pair<SimplicialPair, SimplicialPair>>{
           {edge, edge}, {circle, circle}, {rel, rel}, {circ_pt, circ_pt}, {edge, triangle}, {rel, circle}}) {
    auto maps = ez_aw_maps(a, b, Ring::Z);
    auto cert = check_ez_aw(maps);
    CHECK(cert.ez_chain_map);
    CHECK(cert.aw_chain_map);
    CHECK(cert.aw_ez_identity);
    CHECK(cert.ez_aw_homology_identity);
  }

  // degree zero: x ⊗ y -> (x, y)
  auto maps = ez_aw_maps(edge, edge, Ring::Z);
  for (std::size_t col = 0; col < maps.ez[0].cols(); ++col) {
    const auto& cell = maps.tensor.cells(0)[col];
    Vertex v = maps.index.id(maps.left.basis(0)[cell.i][0], maps.right.basis(0)[cell.j][0]);
    auto row = maps.product.basis_index({v});
    REQUIRE(row);
    for (std::size_t r = 0; r < maps.ez[0].rows(); ++r) CHECK(maps.ez[0](r, col) == (r == *row ? 1 : 0));
  }

  // Künneth over Q for S^1 x S^1
  auto q = ez_aw_maps(circle, circle, Ring::Q);
  for (int n = 0; n <= 2; ++n) {
    std::size_t expected = 0;
    for (int p = 0; p <= n; ++p) expected += q.left.module(p).free_rank * q.right.module(n - p).free_rank;
    CHECK(q.product.module(n).free_rank == expected);
    CHECK(q.tensor.complex().homology(n).module().free_rank == expected);
  }
}

TEST_CASE("cup products") {
  SimplicialComplex none;
  auto pt = catalog::space("point");
  auto unit = relative_cup_product(pt, none, none, 0, 0, Ring::Z);
  CHECK(unit.table == IntMatrix::from_rows({{1}}));
  CHECK(unit.comparison_iso);

  auto torus = catalog::space("torus");
  auto cup = relative_cup_product(torus, none, none, 1, 1, Ring::Q);
  CHECK(cup.left == mod(2));
  CHECK(cup.target == mod(1));
  // pairing matrix P(a, b) = <a ⌣ b>
  IntMatrix pairing(2, 2);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) pairing(a, b) = cup.table(0, a * 2 + b);
  CHECK(determinant(pairing) != 0);
  // graded commutativity, (-1)^{1*1}
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) CHECK(pairing(a, b) == -pairing(b, a));

  // 0 x 1 cup with the unit class is the identity of H^1
  auto unit1 = relative_cup_product(torus, none, none, 0, 1, Ring::Z);
  CHECK(unit1.table == IntMatrix::identity(2));

  // relative version: (X, Z1) x (X, Z2) -> (X, Z1 ∪ Z2)
  auto rel = relative_cup_product(catalog::space("triangle"), cx({{0, 1}}), cx({{1, 2}, {0, 2}}), 1, 1, Ring::Z);
  CHECK(rel.comparison_iso);
  CHECK(rel.left.is_zero());
}

TEST_CASE("cup product is associative on cochains") {
  auto torus = catalog::space("torus");
  SimplicialComplex none;
  RelativeHomology c(SimplicialPair::absolute(torus), Ring::Z);
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3);
  auto random_cochain = [&](int p) {
    IntVector v(c.basis(p).size());
    for (auto& x : v) x = coef(rng);
    return v;
  };
  for (int trial = 0; trial < 5; ++trial) {
    auto a = random_cochain(0), b = random_cochain(1), g = random_cochain(1);
    auto lhs = cup_cochains(c, cup_cochains(c, a, 0, c, b, 1, c), 1, c, g, 1, c);
    auto rhs = cup_cochains(c, a, 0, c, cup_cochains(c, b, 1, c, g, 1, c), 2, c);
    CHECK(lhs == rhs);
    auto x = random_cochain(1), y = random_cochain(0), z = random_cochain(1);
    CHECK(cup_cochains(c, cup_cochains(c, x, 1, c, y, 0, c), 1, c, z, 1, c) ==
          cup_cochains(c, x, 1, c, cup_cochains(c, y, 0, c, z, 1, c), 1, c));
  }
}

TEST_CASE("Cech total complexes") {
  auto circle = catalog::space("circle");
  auto one = cech_total_complex(circle, {circle}, {}, Ring::Z);
  CHECK(one.homology[0] == mod(1));
  CHECK(one.homology[1] == mod(1));

  auto arcs = cech_total_complex(circle, {cx({{0, 1}, {1, 2}}), cx({{0, 2}})}, {}, Ring::Z);
  CHECK(arcs.homology[0] == mod(1));
  CHECK(arcs.homology[1] == mod(1));
  for (std::size_t n = 2; n < arcs.homology.size(); ++n) CHECK(arcs.homology[n].is_zero());

  auto tri = catalog::space("triangle");
  auto cover = std::vector{tri, cx({{0, 1}})};
  auto components = std::vector{cx({{0, 1}}), cx({{1, 2}}), cx({{0, 2}})};
  auto c = cech_total_complex(tri, cover, components, Ring::Z);
  for (std::size_t n = 0; n < c.homology.size(); ++n) CHECK(c.homology[n] == (n == 2 ? mod(1) : mod(0)));

  // against relative homology on surfaces with torsion
  auto rp2 = catalog::space("rp2");
  auto halves = std::vector{cx({{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 1, 5}}),
                            cx({{1, 2, 4}, {2, 3, 5}, {1, 3, 4}, {2, 4, 5}, {1, 3, 5}})};
  auto comps = std::vector{cx({{0, 1}}), cx({{1, 2}})};
  auto rc = cech_total_complex(rp2, halves, comps, Ring::Z);
  SimplicialPair pair(rp2, cx({{0, 1}, {1, 2}}));
  for (int n = 0; n <= 2; ++n) CHECK(rc.homology.at(n) == relative_homology(pair, n, Ring::Z));
  for (std::size_t n = 3; n < rc.homology.size(); ++n) CHECK(rc.homology[n].is_zero());

  try {
    cech_total_complex(circle, {cx({{0, 1}})}, {}, Ring::Z);
    FAIL("expected NotACover");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotACover);
  }
}
