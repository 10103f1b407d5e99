#include <doctest.h>

#include <random>

#include "nori/catalog.hpp"
#include "nori/tannaka.hpp"
#include "oracle/commutant_oracle.hpp"

using namespace nori;

namespace {

SimplicialComplex cx(const std::vector<Simplex>& f) { return SimplicialComplex::from_maximal(f); }

RatMatrix rat(std::vector<std::vector<long>> rows, std::size_t cols) {
  RatMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

DiagramRep from_quiver(const oracle::Quiver& q, Ring ring) {
  std::vector<std::tuple<std::size_t, std::size_t, RatMatrix>> edges;
  for (const auto& e : q.edges)
    edges.emplace_back(e.source, e.target, rat(e.m, q.ranks[e.source]));
  return explicit_diagram(ring, q.ranks, edges);
}

// Span of the library basis equals the span of the oracle nullspace.
void check_against_oracle(const oracle::Quiver& q, Ring ring) {
  DiagramRep rep = from_quiver(q, ring);
  EndAlgebra e = end_algebra(rep, Subdiagram::whole(rep));
  auto ref = oracle::commutant(q);
  REQUIRE(e.dimension() == ref.size());
  std::vector<oracle::Row> both = ref;
  for (std::size_t k = 0; k < e.dimension(); ++k) both.push_back(e.family(k));
  CHECK(oracle::row_rank(both, e.ambient()) == ref.size());
  if (ring == Ring::Z) {
    CHECK(e.saturated());
    for (std::size_t k = 0; k < e.dimension(); ++k)
      for (const auto& x : e.family(k)) CHECK(x.get_den() == 1);
  }
  CoalgebraTrunc a = dual_coalgebra(e);
  CHECK(a.coassociative());
  CHECK(a.counital());
  CHECK(factorization_check(rep, Subdiagram::whole(rep)).passed());
}

}  // namespace

TEST_CASE("end algebra of a lone vertex is the full matrix algebra") {
  for (std::size_t n = 1; n <= 3; ++n) {
    auto rep = explicit_diagram(Ring::Z, {n}, {});
    auto e = end_algebra(rep, Subdiagram::whole(rep));
    CHECK(e.dimension() == n * n);
    CHECK(e.saturated());
  }
}

TEST_CASE("diagonal loop gives the diagonal commutant") {
  auto rep = explicit_diagram(Ring::Q, {2}, {{0, 0, rat({{1, 0}, {0, 2}}, 2)}});
  auto e = end_algebra(rep, Subdiagram::whole(rep));
  REQUIRE(e.dimension() == 2);
  CHECK(e.family(0) == RatVector{1, 0, 0, 0});
  CHECK(e.family(1) == RatVector{0, 0, 0, 1});
  auto a = dual_coalgebra(e);
  // two copies of the trivial coalgebra
  RatMatrix delta(4, 2);
  delta(0, 0) = 1;
  delta(3, 1) = 1;
  CHECK(a.delta == delta);
  CHECK(a.counit == rat({{1, 1}}, 2));
  CHECK(factorization_check(rep, Subdiagram::whole(rep)).passed());
}

TEST_CASE("identity edge between rank one vertices") {
  auto rep = explicit_diagram(Ring::Z, {1, 1}, {{0, 1, rat({{1}}, 1)}});
  auto e = end_algebra(rep, Subdiagram::whole(rep));
  REQUIRE(e.dimension() == 1);
  CHECK(e.family(0) == RatVector{1, 1});
  auto a = dual_coalgebra(e);
  CHECK(a.delta == RatMatrix::identity(1));
  CHECK(a.counit == RatMatrix::identity(1));
}

TEST_CASE("matrix coalgebra and its standard coaction") {
  auto rep = explicit_diagram(Ring::Z, {2}, {});
  auto e = end_algebra(rep, Subdiagram::whole(rep));
  REQUIRE(e.dimension() == 4);
  // basis e_{ab} = E_ab at index a*2+b
  for (std::size_t k = 0; k < 4; ++k) {
    RatVector v(4);
    v[k] = 1;
    CHECK(e.family(k) == v);
  }
  auto a = dual_coalgebra(e);
  // Δ(x_ij*) = Σ_k x_kj* ⊗ x_ik*  (dual of the opposite product)
  RatMatrix delta(16, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) delta((k * 2 + j) * 4 + (i * 2 + k), i * 2 + j) = 1;
  CHECK(a.delta == delta);
  CHECK(a.counit == rat({{1, 0, 0, 1}}, 4));
  // ρ(x_j) = Σ_i x_ij* ⊗ x_i
  auto c = coaction(e, 0);
  RatMatrix rho(8, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) rho((i * 2 + j) * 2 + i, j) = 1;
  CHECK(c.rho == rho);
  CHECK(comodule_coassociative(a, c.rho, 2));
  CHECK(comodule_counital(a, c.rho, 2));
}

TEST_CASE("trivial coalgebra") {
  auto t = trivial_coalgebra(Ring::Z);
  CHECK(t.rank == 1);
  CHECK_NOTHROW(t.verify());
  auto rep = explicit_diagram(Ring::Z, {1}, {});
  auto r = realize(rep, Subdiagram::whole(rep));
  CHECK(r.coalgebra.delta == t.delta);
  CHECK(r.coalgebra.counit == t.counit);
  CHECK(r.coactions[0].rho == RatMatrix::identity(1));
  CHECK(factorization_check(r, rep).passed());
}

TEST_CASE("end algebra matches the brute-force commutant") {
  std::mt19937 rng(20240611);
  for (int trial = 0; trial < 60; ++trial) {
    auto q = oracle::random_quiver(rng);
    CAPTURE(trial);
    check_against_oracle(q, Ring::Q);
    check_against_oracle(q, Ring::Z);
  }
}

TEST_CASE("non-integral constraints over Z are rejected") {
  CHECK_THROWS_AS(explicit_diagram(Ring::Z, {1}, {{0, 0, RatMatrix(1, 1, {mpq_class(1, 2)})}}), Error);
}

TEST_CASE("transition maps") {
  SUBCASE("F = F' gives the identity") {
    auto rep = explicit_diagram(Ring::Z, {2, 1}, {{0, 1, rat({{1, 1}}, 2)}});
    auto s = Subdiagram::whole(rep);
    auto t = transition_map(rep, s, s);
    CHECK(t.matrix == RatMatrix::identity(end_algebra(rep, s).dimension()));
    CHECK(t.coalgebra_morphism);
    CHECK(t.coactions_compatible);
  }
  SUBCASE("adding a loop edge: dual of the commutant inclusion is onto") {
    auto rep = explicit_diagram(Ring::Q, {2}, {{0, 0, rat({{1, 0}, {0, 2}}, 2)}});
    auto small = Subdiagram::with_edges(rep, {0}, {});
    auto big = Subdiagram::whole(rep);
    auto t = transition_map(rep, small, big);
    CHECK(t.matrix.rows() == 2);
    CHECK(t.matrix.cols() == 4);
    CHECK(rank(t.matrix) == 2);
    CHECK(t.coalgebra_morphism);
    CHECK(t.coactions_compatible);
  }
  SUBCASE("disjoint union is a split injection") {
    auto rep = explicit_diagram(Ring::Z, {2, 1}, {});
    auto t = transition_map(rep, Subdiagram::full(rep, {0}), Subdiagram::whole(rep));
    CHECK(t.matrix.rows() == 5);
    CHECK(t.matrix.cols() == 4);
    // a coordinate projection is a left inverse
    RatMatrix p(4, 5);
    for (std::size_t i = 0; i < 4; ++i) p(i, i) = 1;
    CHECK(p * t.matrix == RatMatrix::identity(4));
    CHECK(t.coalgebra_morphism);
    CHECK(t.coactions_compatible);
  }
  SUBCASE("random nested subdiagrams") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
      auto q = oracle::random_quiver(rng);
      auto rep = from_quiver(q, trial % 2 ? Ring::Z : Ring::Q);
      auto big = Subdiagram::whole(rep);
      auto small = Subdiagram::with_edges(rep, {0}, {});
      auto t = transition_map(rep, small, big);
      CHECK(t.coalgebra_morphism);
      CHECK(t.coactions_compatible);
    }
  }
  SUBCASE("F must sit inside F'") {
    auto rep = explicit_diagram(Ring::Z, {1, 1}, {});
    CHECK_THROWS_AS(transition_map(rep, Subdiagram::whole(rep), Subdiagram::full(rep, {0})), Error);
  }
}

TEST_CASE("subdiagram validation") {
  auto rep = explicit_diagram(Ring::Z, {1, 1}, {{0, 1, rat({{1}}, 1)}});
  CHECK(Subdiagram::full(rep, {0}).edges.empty());
  CHECK(Subdiagram::whole(rep).edges.size() == 1);
  try {
    Subdiagram::with_edges(rep, {0}, {0});
    FAIL("expected InvalidSubdiagram");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidSubdiagram);
  }
  CHECK_THROWS_AS(rep.add_edge({"bad", EdgeKind::Explicit, 0, 1, RatMatrix(2, 1)}), Error);
}

TEST_CASE("corrupted edge fails naturality and is named") {
  auto rep = explicit_diagram(Ring::Q, {2}, {{0, 0, rat({{1, 0}, {0, 2}}, 2)}});
  auto r = realize(rep, Subdiagram::whole(rep));
  DiagramRep bad = rep;
  bad.edge(0).matrix = rat({{1, 1}, {0, 2}}, 2);
  auto cert = factorization_check(r, bad);
  CHECK_FALSE(cert.passed());
  REQUIRE(cert.edge_failures.size() == 1);
  CHECK(cert.edge_failures[0] == "e0");
  CHECK(cert.comodule_failures.empty());
}

TEST_CASE("pairs diagram") {
  SimplicialComplex pt = cx({{0}});
  SimplicialComplex circle = catalog::space("circle");

  SUBCASE("a point") {
    PairsDiagramSpec spec;
    spec.vertices.push_back({"pt", SimplicialPair::absolute(pt), 0});
    auto rep = build_pairs_diagram(spec, Ring::Z);
    REQUIRE(rep.vertices().size() == 1);
    CHECK(rep.vertex(0).rank() == 1);
    CHECK(rep.vertex(0).free());
    auto r = realize(rep, Subdiagram::whole(rep));
    CHECK(r.coalgebra.rank == 1);
  }

  SUBCASE("circle rel basepoint and the point") {
    PairsDiagramSpec spec;
    spec.vertices.push_back({"gm", SimplicialPair(circle, pt), 1});
    spec.vertices.push_back({"pt", SimplicialPair::absolute(pt), 0});
    spec.triples.push_back({"d", "gm", "pt"});
    auto rep = build_pairs_diagram(spec, Ring::Z);
    CHECK(rep.vertex(0).rank() == 1);
    CHECK(rep.vertex(1).rank() == 1);
    CHECK(rep.edge(0).kind == EdgeKind::Triple);
    CHECK(rep.edge(0).matrix == RatMatrix(1, 1));  // the basepoint survives in h_0
    auto r = realize(rep, Subdiagram::whole(rep));
    CHECK(r.algebra.dimension() == 2);
    // the circle vertex is rank one: ρ(g) = σ ⊗ g for one coalgebra element σ
    const auto& rho = r.coactions[0].rho;
    CHECK(rho.cols() == 1);
    CHECK(comodule_coassociative(r.coalgebra, rho, 1));
    CHECK(comodule_counital(r.coalgebra, rho, 1));
    CHECK(factorization_check(r, rep).passed());
  }

  SUBCASE("triple of the interval carries an isomorphism") {
    SimplicialComplex interval = cx({{0, 1}});
    SimplicialComplex ends = cx({{0}, {1}});
    PairsDiagramSpec spec;
    spec.vertices.push_back({"I", SimplicialPair(interval, ends), 1});
    spec.vertices.push_back({"ends", SimplicialPair(ends, pt), 0});
    spec.triples.push_back({"d", "I", "ends"});
    auto rep = build_pairs_diagram(spec, Ring::Z);
    const auto& m = rep.edge(0).matrix;
    REQUIRE(m.rows() == 1);
    CHECK(abs(m(0, 0)) == 1);
    auto e = end_algebra(rep, Subdiagram::whole(rep));
    CHECK(e.dimension() == 1);
  }

  SUBCASE("map edges") {
    // degree two wrap of the hexagon onto the circle
    SimplicialComplex hex = catalog::space("hexagon");
    std::map<Vertex, Vertex> wrap;
    for (Vertex v = 0; v < 6; ++v) wrap[v] = v % 3;
    PairsDiagramSpec spec;
    spec.vertices.push_back({"hex", SimplicialPair::absolute(hex), 1});
    spec.vertices.push_back({"circle", SimplicialPair::absolute(circle), 1});
    spec.maps.push_back({"wrap", "hex", "circle", SimplicialMap(hex, circle, wrap)});
    auto rep = build_pairs_diagram(spec, Ring::Z);
    CHECK(abs(rep.edge(0).matrix(0, 0)) == 2);
    CHECK(rep.edge(0).kind == EdgeKind::Map);
    CHECK(end_algebra(rep, Subdiagram::whole(rep)).dimension() == 1);
    CHECK(factorization_check(rep, Subdiagram::whole(rep)).passed());
  }

  SUBCASE("torsion vertices are flagged and refused") {
    PairsDiagramSpec spec;
    spec.vertices.push_back({"rp2", SimplicialPair::absolute(catalog::space("rp2")), 1});
    auto z = build_pairs_diagram(spec, Ring::Z);
    CHECK_FALSE(z.vertex(0).free());
    try {
      end_algebra(z, Subdiagram::whole(z));
      FAIL("expected NonFreeVertex");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NonFreeVertex);
    }
    auto q = build_pairs_diagram(spec, Ring::Q);
    CHECK(q.vertex(0).free());
    CHECK(end_algebra(q, Subdiagram::whole(q)).dimension() == 0);
  }

  SUBCASE("degree mismatch and bad nesting") {
    PairsDiagramSpec spec;
    spec.vertices.push_back({"c", SimplicialPair::absolute(circle), 1});
    spec.vertices.push_back({"p", SimplicialPair::absolute(pt), 0});
    spec.maps.push_back({"f", "p", "c", SimplicialMap::inclusion(pt, circle)});
    CHECK_THROWS_AS(build_pairs_diagram(spec, Ring::Z), Error);
    spec.maps.clear();
    spec.triples.push_back({"t", "c", "p"});
    CHECK_THROWS_AS(build_pairs_diagram(spec, Ring::Z), Error);
  }
}
