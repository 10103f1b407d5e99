#include <doctest.h>

#include <algorithm>

#include "nori/catalog.hpp"
#include "nori/filtration.hpp"
#include "oracle/homology_oracle.hpp"

using namespace nori;

namespace {

SimplicialComplex cx(const std::vector<Simplex>& f) { return SimplicialComplex::from_maximal(f); }

FgModule mod(std::size_t free, std::vector<long> torsion = {}) {
  FgModule m;
  m.free_rank = free;
  for (long t : torsion) m.torsion.push_back(t);
  return m;
}

// Brute force over every subset of candidate simplices: the first very good Z
// in (size, lexicographic) order, judged by the oracle's homology.
std::optional<SimplicialComplex> oracle_level(const SimplicialComplex& top, const SimplicialComplex& base, int n) {
  std::vector<Simplex> pool;
  for (int d = 0; d <= n - 1; ++d)
    for (const auto& s : top.simplices(d))
      if (!base.contains(s)) pool.push_back(s);
  REQUIRE(pool.size() <= 20);
  std::vector<std::vector<std::size_t>> subsets;
  for (unsigned long mask = 0; mask < (1ul << pool.size()); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask & (1ul << i)) idx.push_back(i);
    subsets.push_back(idx);
  }
  std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  for (const auto& idx : subsets) {
    std::vector<Simplex> z = base.all_simplices();
    for (auto i : idx) z.push_back(pool[i]);
    // closed under faces?
    std::set<Simplex> have(z.begin(), z.end());
    bool closed = true;
    for (const auto& s : z)
      for (std::size_t i = 0; i < s.size() && s.size() > 1; ++i) {
        Simplex f = s;
        f.erase(f.begin() + i);
        if (!have.count(f)) closed = false;
      }
    if (!closed) continue;
    auto h = oracle::homology(oracle::chains(top.all_simplices(), z));
    bool good = true;
    for (std::size_t k = 0; k < h.betti.size(); ++k) {
      if (static_cast<int>(k) != n && h.betti[k] != 0) good = false;
      for (const auto& [p, t] : h.torsion)
        if (t[k] != 0) good = false;
    }
    if (good) return cx(z);
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("filtrations validate their levels") {
  auto edge = catalog::space("interval");
  CHECK_NOTHROW(Filtration(edge, {cx({{0}, {1}}), edge}));
  CHECK_THROWS_AS(Filtration(edge, {edge}), Error);               // dim F_0 = 1
  CHECK_THROWS_AS(Filtration(edge, {cx({{0}}), cx({{1}})}), Error);  // last level not X
  auto tri = catalog::space("triangle");
  CHECK_THROWS_AS(Filtration(tri, {cx({{0}}), cx({{1, 2}}), tri}), Error);  // not nested
  auto f = Filtration(edge, {cx({{0}, {1}}), edge});
  CHECK(f.length() == 1);
  CHECK(f.level(-1).empty());
  CHECK(f.level(7) == edge);
  CHECK(Filtration::trivial(SimplicialComplex{}).length() == -1);
}

TEST_CASE("very good pairs") {
  auto edge = catalog::space("interval");
  auto ends = cx({{0}, {1}});
  CHECK(is_very_good_pair(edge, ends, 1).very_good);
  CHECK(is_very_good_pair(ends, ends, 1).very_good);
  CHECK_FALSE(is_very_good_pair(edge, edge, 1).very_good);

  auto rp2 = is_very_good_pair(catalog::space("rp2"), SimplicialComplex{}, 2);
  CHECK_FALSE(rp2.very_good);
  CHECK_FALSE(rp2.free);
  CHECK(std::find(rp2.offending_degrees.begin(), rp2.offending_degrees.end(), 1) != rp2.offending_degrees.end());

  // dimension clause: X must have dimension exactly n
  CHECK_FALSE(is_very_good_pair(edge, ends, 2).very_good);
  CHECK_THROWS_AS(is_very_good_pair(ends, edge, 1), Error);
}

TEST_CASE("filtration complex of the interval") {
  auto edge = catalog::space("interval");
  Filtration f(edge, {cx({{0}, {1}}), edge});
  auto c = filtration_complex(f, Ring::Z, true);
  REQUIRE(c.terms.size() == 2);
  CHECK(c.terms[1] == mod(1));
  CHECK(c.terms[0] == mod(2));
  const IntMatrix& d = c.differentials[1].matrix();
  CHECK(d.rows() == 2);
  CHECK(abs(d(0, 0)) == 1);
  CHECK(d(0, 0) == -d(1, 0));
  auto h = c.homology();
  CHECK(h[0] == mod(1));
  CHECK(h[1] == mod(0));
  CHECK(compare_filtration_homology(f, Ring::Z).all_match());
}

TEST_CASE("filtration complex edge cases") {
  auto pts = cx({{0}, {1}, {2}});
  Filtration f(pts, {pts});
  auto c = filtration_complex(f, Ring::Z);
  CHECK(c.terms.size() == 1);
  CHECK(c.terms[0] == mod(3));
  CHECK(compare_filtration_homology(f, Ring::Z).all_match());

  auto pt = catalog::space("point");
  CHECK(compare_filtration_homology(Filtration(pt, {pt}), Ring::Z).all_match());
}

TEST_CASE("filtration complex of the circle") {
  auto circle = catalog::space("circle");
  Filtration f(circle, {cx({{0}, {1}}), circle});
  auto c = filtration_complex(f, Ring::Z);
  CHECK(c.terms[1] == mod(2));
  CHECK(c.terms[0] == mod(2));
  auto cmp = compare_filtration_homology(f, Ring::Z);
  CHECK(cmp.very_good);
  CHECK(cmp.all_match());
  CHECK(cmp.complex_homology[1] == mod(1));
}

TEST_CASE("skeletal filtrations carry torsion into the homology") {
  for (const auto& name : {"rp2", "klein", "torus", "sphere", "moebius"}) {
    auto x = catalog::space(name);
    auto f = Filtration::skeletal(x);
    CHECK(is_very_good(f).very_good);
    auto cmp = compare_filtration_homology(f, Ring::Z);
    CHECK(cmp.all_match());
    auto q = compare_filtration_homology(f, Ring::Q);
    CHECK(q.all_match());
  }
  auto cmp = compare_filtration_homology(Filtration::skeletal(catalog::space("rp2")), Ring::Z);
  CHECK(cmp.complex_homology[1] == mod(0, {2}));
}

TEST_CASE("a filtration that is not very good is flagged") {
  auto x = catalog::space("rp2");
  auto f = Filtration::trivial(x);
  auto cmp = compare_filtration_homology(f, Ring::Z);
  CHECK_FALSE(cmp.very_good);
  CHECK_FALSE(cmp.all_match());
}

TEST_CASE("pushforward") {
  auto circle = catalog::space("circle");
  Filtration f(circle, {cx({{0}}), circle});

  auto same = pushforward_filtration(SimplicialMap::identity(circle), f, Ring::Z);
  CHECK(same.target.level(0) == f.level(0));
  CHECK(same.target.level(1) == circle);
  CHECK(same.commutes);
  for (const auto& m : same.maps) CHECK(m.is_isomorphism());

  auto pt = catalog::space("point");
  SimplicialMap collapse(circle, pt, {{0, 0}, {1, 0}, {2, 0}});
  auto p = pushforward_filtration(collapse, f, Ring::Z);
  CHECK(p.target.level(0) == pt);
  CHECK(p.commutes);
  for (std::size_t i = 1; i < p.maps.size(); ++i) CHECK(p.maps[i].is_zero());

  auto disk = catalog::space("triangle");
  auto into = pushforward_filtration(SimplicialMap::inclusion(circle, disk), f, Ring::Z);
  CHECK(into.target.level(1) == circle);
  CHECK(into.target.level(2) == disk);
  CHECK(into.commutes);
  auto c = filtration_complex(into.target, Ring::Z);
  CHECK(c.homology()[1].is_zero());
  // h_1 of the circle dies in the disk: the degree-1 class maps into the image of d_2
  auto src = filtration_complex(f, Ring::Z);
  auto h1 = src.homology_at(1);
  auto tgt = c.homology_at(1);
  IntVector img = into.maps[1].apply(h1.representative(0));
  CHECK(tgt.classify(img).empty());
}

TEST_CASE("product filtrations") {
  auto pt = catalog::space("point");
  auto pp = product_filtration(Filtration(pt, {pt}), Filtration(pt, {pt}), Ring::Z);
  CHECK(pp.filtration.space().size() == 1);
  CHECK(pp.filtration.length() == 0);

  auto edge = catalog::space("interval");
  Filtration f(edge, {cx({{0}, {1}}), edge});
  auto sq = product_filtration(f, f, Ring::Z);
  const auto& h1 = sq.filtration.level(1);
  CHECK(h1.count(0) == 4);
  CHECK(h1.count(1) == 4);
  CHECK(h1.count(2) == 0);
  CHECK(sq.chain_map);
  CHECK(is_very_good(sq.filtration).very_good);
  for (std::size_t n = 0; n < sq.kunneth.size(); ++n)
    CHECK(ModuleMap(FgModule::free(sq.kunneth[n].cols()), sq.product_complex.terms[n], sq.kunneth[n]).is_isomorphism());

  auto circle = catalog::space("circle");
  Filtration g(circle, {cx({{0}}), circle});
  for (Ring ring : {Ring::Q, Ring::Z}) {
    auto t = product_filtration(g, g, ring);
    CHECK(t.chain_map);
    // Künneth on total homology: the tensor complex and the product complex agree via the map
    const int top = static_cast<int>(t.kunneth.size()) - 1;
    for (int n = 0; n <= top; ++n) {
      IntMatrix din = n + 1 <= top ? t.tensor_differentials[n + 1] : IntMatrix(t.kunneth[n].cols(), 0);
      IntMatrix dout = n > 0 ? t.tensor_differentials[n] : IntMatrix(0, t.kunneth[n].cols());
      auto ht = subquotient(din, dout, ring);
      auto hp = t.product_complex.homology_at(n);
      CHECK(ht.module() == hp.module());
      IntMatrix induced(hp.module().generators(), ht.module().generators());
      for (std::size_t a = 0; a < ht.module().generators(); ++a)
        induced.set_col(a, hp.classify(t.kunneth[n] * ht.representative(a)));
      CHECK(ModuleMap(ht.module(), hp.module(), induced, ring).is_isomorphism());
    }
  }
}

TEST_CASE("very good refinement matches the brute-force oracle") {
  for (const auto& name : {"interval", "circle", "triangle", "sphere", "rp2"}) {
    auto x = catalog::space(name);
    auto res = find_very_good_refinement(Filtration::trivial(x), 100000);
    REQUIRE(res.filtration);
    const auto& g = *res.filtration;
    CHECK(is_very_good(g).very_good);
    CHECK(Filtration::trivial(x).refined_by(g));
    CHECK(compare_filtration_homology(g, Ring::Z).all_match());
    // the top search level agrees with the oracle
    const int n = x.dimension();
    if (n >= 1 && x.count(0) + x.count(1) <= 20) {
      auto z = oracle_level(x, SimplicialComplex{}, n);
      REQUIRE(z);
      CHECK(g.level(n - 1) == *z);
    }
  }
}

TEST_CASE("refinement literal results on small spaces") {
  // the zero module is free and concentrated in every degree, so one vertex suffices
  auto edge = find_very_good_refinement(Filtration::trivial(catalog::space("interval")), 100);
  REQUIRE(edge.filtration);
  CHECK(edge.filtration->level(0) == cx({{0}}));
  auto circle = find_very_good_refinement(Filtration::trivial(catalog::space("circle")), 100);
  REQUIRE(circle.filtration);
  CHECK(circle.filtration->level(0) == cx({{0}}));
}

TEST_CASE("refinement keeps a very good filtration and respects the budget") {
  auto edge = catalog::space("interval");
  Filtration f(edge, {cx({{0}, {1}}), edge});
  auto res = find_very_good_refinement(f, 10);
  REQUIRE(res.filtration);
  CHECK(res.filtration->levels() == f.levels());

  auto rp2 = catalog::space("rp2");
  try {
    find_very_good_refinement(Filtration::trivial(rp2), 3);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BudgetExceeded);
  }

  // starting from a given F_1 on the torus
  auto torus = catalog::space("torus");
  auto loops = cx({{0, 1}, {1, 2}, {0, 2}, {0, 3}, {3, 6}, {0, 6}});
  Filtration t(torus, {SimplicialComplex{}, loops, torus});
  auto rt = find_very_good_refinement(t, 1000);
  REQUIRE(rt.filtration);
  CHECK(rt.filtration->level(1) == loops);
  CHECK(compare_filtration_homology(*rt.filtration, Ring::Z).all_match());
}
