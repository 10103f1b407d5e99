#include "nori/tannaka.hpp"

#include <algorithm>

namespace nori {

const char* to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Map: return "map";
    case EdgeKind::Triple: return "triple";
    case EdgeKind::Explicit: return "explicit";
    case EdgeKind::Swap: return "swap";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Diagram representations

std::size_t DiagramRep::add_vertex(RepVertex v) {
  if (find_vertex(v.label)) throw Error(Errc::InvalidInput, "duplicate vertex '" + v.label + "'");
  vertices_.push_back(std::move(v));
  return vertices_.size() - 1;
}

std::size_t DiagramRep::add_edge(RepEdge e) {
  if (e.source >= vertices_.size() || e.target >= vertices_.size())
    throw Error(Errc::InvalidInput, "edge '" + e.label + "' has an unknown endpoint");
  if (e.matrix.rows() != vertices_[e.target].rank() || e.matrix.cols() != vertices_[e.source].rank())
    throw Error(Errc::DimensionMismatch, "edge '" + e.label + "' matrix does not match vertex ranks");
  if (ring_ == Ring::Z && !is_integral(e.matrix))
    throw Error(Errc::NotIntegral, "edge '" + e.label + "' is not integral");
  edges_.push_back(std::move(e));
  return edges_.size() - 1;
}

std::optional<std::size_t> DiagramRep::find_vertex(const std::string& label) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i].label == label) return i;
  return std::nullopt;
}

std::size_t DiagramRep::vertex_index(const std::string& label) const {
  auto i = find_vertex(label);
  if (!i) throw Error(Errc::InvalidInput, "unknown vertex '" + label + "'");
  return *i;
}

std::size_t DiagramRep::edge_index(const std::string& label) const {
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (edges_[i].label == label) return i;
  throw Error(Errc::InvalidInput, "unknown edge '" + label + "'");
}

DiagramRep explicit_diagram(Ring ring, const std::vector<std::size_t>& ranks,
                            const std::vector<std::tuple<std::size_t, std::size_t, RatMatrix>>& edges) {
  DiagramRep rep(ring);
  for (std::size_t i = 0; i < ranks.size(); ++i)
    rep.add_vertex({"v" + std::to_string(i), FgModule::free(ranks[i]), std::nullopt, 0});
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& [s, t, m] = edges[k];
    rep.add_edge({"e" + std::to_string(k), EdgeKind::Explicit, s, t, m});
  }
  return rep;
}

RelativeHomology vertex_homology(const RepVertex& v, Ring ring) {
  if (!v.pair) throw Error(Errc::InvalidInput, "vertex '" + v.label + "' is not a pair");
  return RelativeHomology(*v.pair, ring);
}

DiagramRep build_pairs_diagram(const PairsDiagramSpec& spec, Ring ring) {
  DiagramRep rep(ring);
  std::vector<RelativeHomology> homology;
  for (const auto& v : spec.vertices) {
    homology.emplace_back(v.pair, ring);
    rep.add_vertex({v.label, homology.back().module(v.degree), v.pair, v.degree});
  }
  for (const auto& m : spec.maps) {
    const std::size_t s = rep.vertex_index(m.source), t = rep.vertex_index(m.target);
    if (rep.vertex(s).degree != rep.vertex(t).degree)
      throw Error(Errc::InvalidInput, "map edge '" + m.label + "' changes the degree");
    auto f = induced_map(m.map, homology[s], homology[t], rep.vertex(s).degree);
    rep.add_edge({m.label, EdgeKind::Map, s, t, to_rational(f.matrix())});
  }
  for (const auto& tr : spec.triples) {
    const std::size_t s = rep.vertex_index(tr.source), t = rep.vertex_index(tr.target);
    const auto& a = rep.vertex(s);
    const auto& b = rep.vertex(t);
    if (b.degree != a.degree - 1) throw Error(Errc::InvalidInput, "triple edge '" + tr.label + "' must lower the degree by one");
    if (!(a.pair->Z == b.pair->X)) throw Error(Errc::NotNested, "triple edge '" + tr.label + "' is not nested");
    auto d = triple_boundary(homology[s], homology[t], a.degree);
    rep.add_edge({tr.label, EdgeKind::Triple, s, t, to_rational(d.matrix())});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Subdiagrams

Subdiagram Subdiagram::full(const DiagramRep& rep, std::vector<std::size_t> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  Subdiagram s;
  s.vertices = std::move(vertices);
  for (std::size_t v : s.vertices)
    if (v >= rep.vertices().size()) throw Error(Errc::InvalidSubdiagram, "vertex index out of range");
  for (std::size_t e = 0; e < rep.edges().size(); ++e)
    if (s.local(rep.edge(e).source) && s.local(rep.edge(e).target)) s.edges.push_back(e);
  return s;
}

Subdiagram Subdiagram::with_edges(const DiagramRep& rep, std::vector<std::size_t> vertices,
                                  std::vector<std::size_t> edges) {
  Subdiagram s = full(rep, std::move(vertices));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (std::size_t e : edges) {
    if (e >= rep.edges().size()) throw Error(Errc::InvalidSubdiagram, "edge index out of range");
    if (!s.local(rep.edge(e).source) || !s.local(rep.edge(e).target))
      throw Error(Errc::InvalidSubdiagram, "edge '" + rep.edge(e).label + "' leaves the vertex set");
  }
  s.edges = std::move(edges);
  return s;
}

Subdiagram Subdiagram::whole(const DiagramRep& rep) {
  std::vector<std::size_t> all(rep.vertices().size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return full(rep, all);
}

bool Subdiagram::contains(const Subdiagram& other) const {
  return std::includes(vertices.begin(), vertices.end(), other.vertices.begin(), other.vertices.end()) &&
         std::includes(edges.begin(), edges.end(), other.edges.begin(), other.edges.end());
}

std::optional<std::size_t> Subdiagram::local(std::size_t vertex) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), vertex);
  if (it == vertices.end() || *it != vertex) return std::nullopt;
  return static_cast<std::size_t>(it - vertices.begin());
}

// ---------------------------------------------------------------------------
// End(T|F)

RatMatrix EndAlgebra::block(const RatVector& family, std::size_t local) const {
  const std::size_t r = ranks_.at(local), off = offsets_.at(local);
  RatMatrix m(r, r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) m(a, b) = family.at(off + a * r + b);
  return m;
}

RatVector EndAlgebra::compose(const RatVector& a, const RatVector& b) const {
  RatVector out(ambient());
  for (std::size_t l = 0; l < ranks_.size(); ++l) {
    RatMatrix p = block(a, l) * block(b, l);
    const std::size_t r = ranks_[l];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) out[offsets_[l] + i * r + j] = p(i, j);
  }
  return out;
}

bool EndAlgebra::saturated() const {
  if (ring_ == Ring::Q) return true;
  IntMatrix b = to_integer(basis_.rows()).transpose();
  auto s = smith_normal_form(b, {.track_left = false, .track_right = false});
  if (s.rank != dimension()) return false;
  return std::all_of(s.diagonal.begin(), s.diagonal.end(), [](const mpz_class& d) { return d == 1; });
}

RatMatrix commutation_constraints(const DiagramRep& rep, const Subdiagram& sub) {
  std::vector<std::size_t> ranks, offsets;
  std::size_t ambient = 0;
  for (std::size_t v : sub.vertices) {
    ranks.push_back(rep.vertex(v).rank());
    offsets.push_back(ambient);
    ambient += ranks.back() * ranks.back();
  }
  std::size_t rows = 0;
  for (std::size_t e : sub.edges) rows += rep.edge(e).matrix.rows() * rep.edge(e).matrix.cols();
  RatMatrix c(rows, ambient);
  std::size_t row = 0;
  for (std::size_t e : sub.edges) {
    const RepEdge& edge = rep.edge(e);
    const std::size_t lv = *sub.local(edge.source), lw = *sub.local(edge.target);
    const std::size_t rv = ranks[lv], rw = ranks[lw];
    const RatMatrix& t = edge.matrix;
    for (std::size_t a = 0; a < rw; ++a)
      for (std::size_t b = 0; b < rv; ++b, ++row) {
        // (T φ_v)(a,b) - (φ_w T)(a,b)
        for (std::size_t k = 0; k < rv; ++k)
          if (t(a, k) != 0) c(row, offsets[lv] + k * rv + b) += t(a, k);
        for (std::size_t k = 0; k < rw; ++k)
          if (t(k, b) != 0) c(row, offsets[lw] + a * rw + k) -= t(k, b);
      }
  }
  return c;
}

EndAlgebra end_algebra(const DiagramRep& rep, const Subdiagram& sub) {
  EndAlgebra e;
  e.ring_ = rep.ring();
  e.sub_ = sub;
  std::size_t ambient = 0;
  for (std::size_t v : sub.vertices) {
    const RepVertex& vx = rep.vertex(v);
    if (!vx.free()) throw Error(Errc::NonFreeVertex, "vertex '" + vx.label + "' has torsion " + vx.module.str());
    e.ranks_.push_back(vx.rank());
    e.offsets_.push_back(ambient);
    ambient += vx.rank() * vx.rank();
  }
  RatMatrix c = commutation_constraints(rep, sub);
  RatMatrix rows;
  if (e.ring_ == Ring::Z) {
    IntMatrix k = c.rows() == 0 ? IntMatrix::identity(ambient) : integer_kernel(to_integer(c));
    rows = to_rational(hermite_rows(k.transpose()));
    if (k.cols() == 0) rows = RatMatrix(0, ambient);
  } else {
    RatMatrix k = c.rows() == 0 ? RatMatrix::identity(ambient) : rational_kernel(c);
    if (k.cols() == 0) {
      rows = RatMatrix(0, ambient);
    } else {
      Rref r = rref(k.transpose());
      rows = r.reduced.block(0, 0, r.pivots.size(), ambient);
    }
  }
  e.basis_ = EchelonBasis(rows);

  const std::size_t n = e.dimension();
  RatVector id(ambient);
  for (std::size_t l = 0; l < e.ranks_.size(); ++l)
    for (std::size_t i = 0; i < e.ranks_[l]; ++i) id[e.offsets_[l] + i * e.ranks_[l] + i] = 1;
  auto u = e.basis_.coordinates(id);
  if (!u) throw Error(Errc::AxiomViolation, "identity family is not compatible");
  e.unit_ = *u;

  e.mult_ = RatMatrix(n, n * n);
  std::vector<RatVector> fam(n);
  for (std::size_t i = 0; i < n; ++i) fam[i] = e.family(i);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto c_ij = e.basis_.coordinates(e.compose(fam[i], fam[j]));
      if (!c_ij) throw Error(Errc::AxiomViolation, "compatible families not closed under composition");
      e.mult_.set_col(i * n + j, *c_ij);
    }
  return e;
}

// ---------------------------------------------------------------------------
// Coalgebras

bool CoalgebraTrunc::coassociative() const {
  const auto id = RatMatrix::identity(rank);
  return kron(delta, id) * delta == kron(id, delta) * delta;
}

bool CoalgebraTrunc::counital() const {
  const auto id = RatMatrix::identity(rank);
  return kron(counit, id) * delta == id && kron(id, counit) * delta == id;
}

void CoalgebraTrunc::verify() const {
  if (delta.rows() != rank * rank || delta.cols() != rank || counit.rows() != 1 || counit.cols() != rank)
    throw Error(Errc::DimensionMismatch, "coalgebra shapes");
  if (!coassociative()) throw Error(Errc::AxiomViolation, "comultiplication is not coassociative");
  if (!counital()) throw Error(Errc::AxiomViolation, "counit axiom fails");
}

CoalgebraTrunc trivial_coalgebra(Ring ring) {
  CoalgebraTrunc c;
  c.ring = ring;
  c.rank = 1;
  c.delta = RatMatrix::identity(1);
  c.counit = RatMatrix::identity(1);
  return c;
}

CoalgebraTrunc dual_coalgebra(const EndAlgebra& e) {
  CoalgebraTrunc c;
  c.ring = e.ring();
  const std::size_t n = e.dimension();
  c.rank = n;
  c.delta = RatMatrix(n * n, n);
  const RatMatrix& m = e.structure_constants();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c.delta(i * n + j, k) = m(k, j * n + i);
  c.counit = RatMatrix(1, n);
  for (std::size_t k = 0; k < n; ++k) c.counit(0, k) = e.unit()[k];
  c.verify();
  return c;
}

Coaction coaction(const EndAlgebra& e, std::size_t vertex) {
  auto l = e.subdiagram().local(vertex);
  if (!l) throw Error(Errc::InvalidSubdiagram, "vertex not in the subdiagram");
  Coaction c;
  c.vertex = vertex;
  c.rank = e.rank(*l);
  const std::size_t n = e.dimension(), r = c.rank;
  c.rho = RatMatrix(n * r, r);
  for (std::size_t k = 0; k < n; ++k) {
    RatMatrix b = e.block(e.family(k), *l);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t j = 0; j < r; ++j) c.rho(k * r + a, j) = b(a, j);
  }
  return c;
}

bool comodule_coassociative(const CoalgebraTrunc& c, const RatMatrix& rho, std::size_t rank) {
  if (rho.rows() != c.rank * rank || rho.cols() != rank) return false;
  return kron(c.delta, RatMatrix::identity(rank)) * rho == kron(RatMatrix::identity(c.rank), rho) * rho;
}

bool comodule_counital(const CoalgebraTrunc& c, const RatMatrix& rho, std::size_t rank) {
  if (rho.rows() != c.rank * rank || rho.cols() != rank) return false;
  return kron(c.counit, RatMatrix::identity(rank)) * rho == RatMatrix::identity(rank);
}

bool comodule_morphism(const CoalgebraTrunc& c, const RatMatrix& rho_v, const RatMatrix& rho_w, const RatMatrix& t) {
  if (rho_w.cols() != t.rows() || rho_v.cols() != t.cols()) return false;
  return rho_w * t == kron(RatMatrix::identity(c.rank), t) * rho_v;
}

// ---------------------------------------------------------------------------
// Transitions

Transition transition_map(const EndAlgebra& small, const EndAlgebra& big) {
  const Subdiagram& f = small.subdiagram();
  const Subdiagram& g = big.subdiagram();
  if (!g.contains(f)) throw Error(Errc::InvalidSubdiagram, "transition requires F ⊆ F'");
  const std::size_t n = small.dimension(), m = big.dimension();
  RatMatrix r(n, m);  // restriction in coordinates
  for (std::size_t k = 0; k < m; ++k) {
    RatVector fam = big.family(k);
    RatVector res(small.ambient());
    for (std::size_t l = 0; l < f.vertices.size(); ++l) {
      const std::size_t lb = *g.local(f.vertices[l]);
      const std::size_t rk = small.rank(l);
      for (std::size_t i = 0; i < rk * rk; ++i) res[small.offset(l) + i] = fam[big.offset(lb) + i];
    }
    auto c = small.coordinates(res);
    if (!c) throw Error(Errc::AxiomViolation, "restriction leaves the compatible families");
    r.set_col(k, *c);
  }
  Transition t;
  t.matrix = r.transpose();
  const CoalgebraTrunc a = dual_coalgebra(small), b = dual_coalgebra(big);
  t.coalgebra_morphism = b.delta * t.matrix == kron(t.matrix, t.matrix) * a.delta && b.counit * t.matrix == a.counit;
  for (std::size_t v : f.vertices) {
    Coaction ca = coaction(small, v), cb = coaction(big, v);
    if (!(kron(t.matrix, RatMatrix::identity(ca.rank)) * ca.rho == cb.rho)) t.coactions_compatible = false;
  }
  return t;
}

Transition transition_map(const DiagramRep& rep, const Subdiagram& small, const Subdiagram& big) {
  return transition_map(end_algebra(rep, small), end_algebra(rep, big));
}

// ---------------------------------------------------------------------------
// Factorization

Realization realize(const DiagramRep& rep, const Subdiagram& sub) {
  EndAlgebra e = end_algebra(rep, sub);
  CoalgebraTrunc a = dual_coalgebra(e);
  std::vector<Coaction> cs;
  for (std::size_t v : sub.vertices) cs.push_back(coaction(e, v));
  return Realization{std::move(e), std::move(a), std::move(cs)};
}

FactorizationCertificate factorization_check(const Realization& r, const DiagramRep& rep) {
  FactorizationCertificate cert;
  const Subdiagram& sub = r.algebra.subdiagram();
  for (std::size_t l = 0; l < sub.vertices.size(); ++l) {
    const Coaction& c = r.coactions[l];
    const RepVertex& v = rep.vertex(sub.vertices[l]);
    if (!comodule_coassociative(r.coalgebra, c.rho, c.rank) || !comodule_counital(r.coalgebra, c.rho, c.rank))
      cert.comodule_failures.push_back(v.label);
    if (c.rank != v.rank() || !v.free()) cert.forgetful_failures.push_back(v.label);
  }
  for (std::size_t e : sub.edges) {
    const RepEdge& edge = rep.edge(e);
    const Coaction& cv = r.coactions[*sub.local(edge.source)];
    const Coaction& cw = r.coactions[*sub.local(edge.target)];
    if (!comodule_morphism(r.coalgebra, cv.rho, cw.rho, edge.matrix)) cert.edge_failures.push_back(edge.label);
  }
  return cert;
}

FactorizationCertificate factorization_check(const DiagramRep& rep, const Subdiagram& sub) {
  return factorization_check(realize(rep, sub), rep);
}

}  // namespace nori
