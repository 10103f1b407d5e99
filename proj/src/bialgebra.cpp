#include "nori/bialgebra.hpp"

#include <sstream>

namespace nori {

namespace {

RatMatrix inverse(const RatMatrix& m) {
  if (m.rows() != m.cols()) throw Error(Errc::DimensionMismatch, "inverse of a non-square matrix");
  const std::size_t n = m.rows();
  Rref r = rref(hconcat(m, RatMatrix::identity(n)));
  if (r.pivots.size() < n || (n > 0 && r.pivots[n - 1] >= n))
    throw Error(Errc::AxiomViolation, "matrix is not invertible");
  return r.reduced.block(0, n, n, n);
}

bool same_pair(const SimplicialPair& a, const SimplicialPair& b) { return a.X == b.X && a.Z == b.Z; }

// Tensor chain a ⊗ b in degree p + q of `t`.
IntVector tensor_chain(const TensorComplex& t, int p, const IntVector& a, int q, const IntVector& b) {
  IntVector out(t.complex().rank(p + q));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      if (b[j] != 0) out[t.index(p + q, p, i, j)] = a[i] * b[j];
  }
  return out;
}

std::string vertex_name(const DiagramRep& rep, std::size_t v) { return "'" + rep.vertex(v).label + "'"; }

// Permutes the rows of a d^4-row matrix: a⊗b⊗c⊗e -> a⊗c⊗b⊗e.
RatMatrix swap_middle_rows(const RatMatrix& m, std::size_t d) {
  RatMatrix out(m.rows(), m.cols());
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t c = 0; c < d; ++c)
        for (std::size_t e = 0; e < d; ++e) {
          const std::size_t from = ((a * d + b) * d + c) * d + e;
          const std::size_t to = ((a * d + c) * d + b) * d + e;
          for (std::size_t j = 0; j < m.cols(); ++j) out(to, j) = m(from, j);
        }
  return out;
}

std::string first_difference(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return "shape mismatch";
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << "): " << a(i, j) << " vs " << b(i, j);
        return os.str();
      }
  return "";
}

AxiomCheck compare(std::string name, const RatMatrix& lhs, const RatMatrix& rhs) {
  std::string diff = first_difference(lhs, rhs);
  return {std::move(name), diff.empty() ? CheckStatus::Pass : CheckStatus::Fail, diff};
}

std::optional<std::size_t> unit_vertex(const DiagramRep& rep, const Subdiagram& f) {
  for (std::size_t v : f.vertices)
    if (is_unit_vertex(rep, v)) return v;
  return std::nullopt;
}

}  // namespace

bool is_good_vertex(const DiagramRep& rep, std::size_t v) {
  const RepVertex& vx = rep.vertex(v);
  if (!vx.pair) return vx.free();
  RelativeHomology h(*vx.pair, rep.ring());
  for (int k = 0; k <= h.top_degree(); ++k) {
    FgModule m = h.module(k);
    if (k == vx.degree ? !m.is_free() : !m.is_zero()) return false;
  }
  return true;
}

bool is_unit_vertex(const DiagramRep& rep, std::size_t v) {
  const RepVertex& vx = rep.vertex(v);
  return vx.pair && vx.degree == 0 && vx.pair->X.size() == 1 && vx.pair->Z.empty();
}

// ---------------------------------------------------------------------------
// τ

namespace {

std::optional<std::size_t> find_product_vertex(const DiagramRep& rep, std::size_t v, std::size_t w,
                                               std::optional<ProductPair>& cache) {
  const RepVertex& a = rep.vertex(v);
  const RepVertex& b = rep.vertex(w);
  if (!a.pair || !b.pair) return std::nullopt;
  const std::size_t nv = a.pair->X.vertices().size() * b.pair->X.vertices().size();
  for (std::size_t p = 0; p < rep.vertices().size(); ++p) {
    const RepVertex& c = rep.vertex(p);
    if (!c.pair || c.degree != a.degree + b.degree || c.pair->X.vertices().size() != nv) continue;
    if (!cache) cache = product_pair(*a.pair, *b.pair);
    if (same_pair(*c.pair, cache->pair)) return p;
  }
  return std::nullopt;
}

}  // namespace

namespace {

// Assumes v, w and p are good and p is the product vertex.
TauIso tau_for(const DiagramRep& rep, std::size_t v, std::size_t w, std::size_t p) {
  // pt × X is X with the same vertex ids, and EZ/AW are the identity on it
  if ((is_unit_vertex(rep, v) && p == w) || (is_unit_vertex(rep, w) && p == v)) {
    const std::size_t r = rep.vertex(p).rank();
    return {v, w, p, RatMatrix::identity(r), RatMatrix::identity(r)};
  }
  const int n = rep.vertex(v).degree, m = rep.vertex(w).degree, total = n + m;
  const Ring ring = rep.ring();
  EzAw maps = ez_aw_maps(*rep.vertex(v).pair, *rep.vertex(w).pair, ring);
  const Subquotient& sv = maps.left.degree(n);
  const Subquotient& sw = maps.right.degree(m);
  const Subquotient& sp = maps.product.degree(total);
  const std::size_t rv = sv.module().generators(), rw = sw.module().generators(), rp = sp.module().generators();
  if (rp != rv * rw) throw Error(Errc::NotGoodPair, "Künneth ranks do not match");

  const ChainComplex& tc = maps.tensor.complex();
  Subquotient st = subquotient(tc.boundary(total + 1), tc.boundary(total), ring);

  TauIso tau;
  tau.left = v;
  tau.right = w;
  tau.product = p;
  // EZ: cross products of generators, classified in the product
  RatMatrix ez(rp, rv * rw), cross(st.module().generators(), rv * rw);
  for (std::size_t i = 0; i < rv; ++i)
    for (std::size_t j = 0; j < rw; ++j) {
      IntVector t = tensor_chain(maps.tensor, n, sv.representative(i), m, sw.representative(j));
      IntVector c = maps.ez.at(total) * t;
      IntVector k = sp.classify(c);
      IntVector kt = st.classify(t);
      for (std::size_t r = 0; r < rp; ++r) ez(r, i * rw + j) = k[r];
      for (std::size_t r = 0; r < kt.size(); ++r) cross(r, i * rw + j) = kt[r];
    }
  // AW: product generators classified in tensor homology, then in the cross basis
  RatMatrix aw(st.module().generators(), rp);
  for (std::size_t k = 0; k < rp; ++k) {
    IntVector c = maps.aw.at(total) * sp.representative(k);
    IntVector kt = st.classify(c);
    for (std::size_t r = 0; r < kt.size(); ++r) aw(r, k) = kt[r];
  }
  tau.matrix = inverse(cross) * aw;
  tau.inverse = ez;
  if (!(tau.matrix * tau.inverse == RatMatrix::identity(rv * rw)))
    throw Error(Errc::AxiomViolation, "AW and EZ are not inverse on homology");
  if (ring == Ring::Z && (!is_integral(tau.matrix) || !is_integral(tau.inverse)))
    throw Error(Errc::NotGoodPair, "Künneth map is not unimodular");
  return tau;
}

}  // namespace

TauIso kunneth_tau(const DiagramRep& rep, std::size_t v, std::size_t w) {
  std::optional<ProductPair> pp;
  auto p = find_product_vertex(rep, v, w, pp);
  if (!p) throw Error(Errc::MissingProducts, "no product vertex for " + vertex_name(rep, v) + " x " + vertex_name(rep, w));
  for (std::size_t x : {v, w, *p})
    if (!is_good_vertex(rep, x)) throw Error(Errc::NotGoodPair, vertex_name(rep, x) + " is not a good pair");
  return tau_for(rep, v, w, *p);
}

const TauIso* ProductStructure::find(std::size_t v, std::size_t w) const {
  for (const auto& t : taus)
    if (t.left == v && t.right == w) return &t;
  return nullptr;
}

ProductStructure product_structure(const DiagramRep& rep) {
  ProductStructure ps;
  std::vector<bool> good(rep.vertices().size());
  for (std::size_t v = 0; v < good.size(); ++v) good[v] = rep.vertex(v).pair && is_good_vertex(rep, v);
  for (std::size_t v = 0; v < good.size(); ++v)
    for (std::size_t w = 0; w < good.size(); ++w) {
      if (!good[v] || !good[w]) continue;
      std::optional<ProductPair> pp;
      auto p = find_product_vertex(rep, v, w, pp);
      if (p && good[*p]) ps.taus.push_back(tau_for(rep, v, w, *p));
    }
  return ps;
}

std::size_t add_swap_edges(DiagramRep& rep, const ProductStructure& ps) {
  std::size_t added = 0;
  for (const auto& t : ps.taus) {
    if (is_unit_vertex(rep, t.left) || is_unit_vertex(rep, t.right)) continue;
    const TauIso* mirror = ps.find(t.right, t.left);
    if (!mirror) continue;
    const std::string label = "swap(" + rep.vertex(t.left).label + "," + rep.vertex(t.right).label + ")";
    bool exists = false;
    for (const auto& e : rep.edges()) exists = exists || e.label == label;
    if (exists) continue;
    ProductPair xy = product_pair(*rep.vertex(t.left).pair, *rep.vertex(t.right).pair);
    ProductPair yx = product_pair(*rep.vertex(t.right).pair, *rep.vertex(t.left).pair);
    SimplicialMap s = product_swap(xy, yx);
    RelativeHomology src(xy.pair, rep.ring()), tgt(yx.pair, rep.ring());
    ModuleMap f = induced_map(s, src, tgt, rep.vertex(t.product).degree);
    rep.add_edge({label, EdgeKind::Swap, t.product, mirror->product, to_rational(f.matrix())});
    ++added;
  }
  return added;
}

// ---------------------------------------------------------------------------
// Products on truncations

ProductFragment product_on_truncations(const DiagramRep& rep, const ProductStructure& ps,
                                       const Subdiagram& f, const Subdiagram& g, const Subdiagram& h) {
  ProductFragment out{f, g, h, end_algebra(rep, f), end_algebra(rep, g), end_algebra(rep, h), {}, {}};
  const EndAlgebra& ef = out.left_algebra;
  const EndAlgebra& eg = out.right_algebra;
  const EndAlgebra& eh = out.target_algebra;
  const std::size_t df = ef.dimension(), dg = eg.dimension(), dh = eh.dimension();

  struct Block {
    std::size_t lv, lw, lp;
    const TauIso* tau;
    RatMatrix tau_inv;
  };
  std::vector<Block> blocks;
  std::size_t rows = 0;
  for (std::size_t lv = 0; lv < f.vertices.size(); ++lv)
    for (std::size_t lw = 0; lw < g.vertices.size(); ++lw) {
      const std::size_t v = f.vertices[lv], w = g.vertices[lw];
      const TauIso* t = ps.find(v, w);
      if (!t) throw Error(Errc::MissingProducts, "no τ for " + vertex_name(rep, v) + " x " + vertex_name(rep, w));
      auto lp = h.local(t->product);
      if (!lp) throw Error(Errc::MissingProducts, "product vertex " + vertex_name(rep, t->product) + " not in H");
      blocks.push_back({lv, lw, *lp, t, inverse(t->matrix)});
      rows += t->matrix.rows() * t->matrix.rows();
    }

  RatMatrix gens(rows, df * dg);
  for (std::size_t s = 0; s < df; ++s) {
    const RatVector fs = ef.family(s);
    for (std::size_t t = 0; t < dg; ++t) {
      const RatVector gt = eg.family(t);
      std::size_t row = 0;
      for (const auto& b : blocks) {
        RatMatrix k = kron(ef.block(fs, b.lv), eg.block(gt, b.lw));
        for (std::size_t i = 0; i < k.rows(); ++i)
          for (std::size_t j = 0; j < k.cols(); ++j) gens(row++, s * dg + t) = k(i, j);
      }
    }
  }

  out.pi = RatMatrix(df * dg, dh);
  for (std::size_t k = 0; k < dh; ++k) {
    const RatVector phi = eh.family(k);
    RatVector target(rows);
    std::size_t row = 0;
    for (const auto& b : blocks) {
      RatMatrix c = b.tau->matrix * eh.block(phi, b.lp) * b.tau_inv;
      for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) target[row++] = c(i, j);
    }
    auto sol = solve_in_span(gens, target);
    if (!sol) throw Error(Errc::ProductEscape, "basis family " + std::to_string(k) + " of End(T|H) leaves End(T|F) ⊗ End(T|G)");
    if (rep.ring() == Ring::Z)
      for (const auto& x : *sol)
        if (x.get_den() != 1)
          throw Error(Errc::IntegralEscape, "basis family " + std::to_string(k) + " lands only rationally");
    out.pi.set_col(k, *sol);
  }
  out.mu = out.pi.transpose();
  return out;
}

// ---------------------------------------------------------------------------
// Axioms

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "?";
}

bool BialgebraCertificate::passed() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::Fail) return false;
  return true;
}

BialgebraCertificate bialgebra_axiom_check(const DiagramRep& rep, const ProductStructure& ps,
                                           const Subdiagram& f, const Subdiagram& h,
                                           const std::optional<Subdiagram>& k) {
  BialgebraCertificate cert;
  ProductFragment frag = product_on_truncations(rep, ps, f, f, h);
  const CoalgebraTrunc af = dual_coalgebra(frag.left_algebra);
  const CoalgebraTrunc ah = dual_coalgebra(frag.target_algebra);
  const std::size_t d = af.rank;
  const RatMatrix& mu = frag.mu;

  cert.checks.push_back(compare("delta multiplicative", ah.delta * mu,
                                kron(mu, mu) * swap_middle_rows(kron(af.delta, af.delta), d)));
  cert.checks.push_back(compare("counit multiplicative", ah.counit * mu, kron(af.counit, af.counit)));

  RatMatrix flip(d * d, d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) flip(b * d + a, a * d + b) = 1;
  cert.checks.push_back(compare("commutative", mu * flip, mu));

  if (auto u = unit_vertex(rep, f)) {
    RatMatrix unit = coaction(frag.left_algebra, *u).rho;  // d x 1
    cert.checks.push_back(compare("unit group-like", af.delta * unit, kron(unit, unit)));
    cert.checks.push_back(compare("unit counit", af.counit * unit, RatMatrix::identity(1)));
    RatMatrix t = transition_map(frag.left_algebra, frag.target_algebra).matrix;
    cert.checks.push_back(compare("left unit", mu * kron(unit, RatMatrix::identity(d)), t));
    cert.checks.push_back(compare("right unit", mu * kron(RatMatrix::identity(d), unit), t));
  } else {
    cert.checks.push_back({"unit", CheckStatus::Skipped, "no unit vertex in F"});
  }

  if (k) {
    try {
      ProductFragment left = product_on_truncations(rep, ps, h, f, *k);
      ProductFragment right = product_on_truncations(rep, ps, f, h, *k);
      cert.checks.push_back(compare("associative", left.mu * kron(mu, RatMatrix::identity(d)),
                                    right.mu * kron(RatMatrix::identity(d), mu)));
    } catch (const Error& e) {
      if (e.code() != Errc::MissingProducts) throw;
      cert.checks.push_back({"associative", CheckStatus::Skipped, e.what()});
    }
  } else {
    cert.checks.push_back({"associative", CheckStatus::Skipped, "no triple-product truncation given"});
  }
  return cert;
}

// ---------------------------------------------------------------------------
// σ

SigmaElement sigma_element(const DiagramRep& rep, const Subdiagram& f, std::size_t vertex) {
  if (rep.vertex(vertex).rank() != 1)
    throw Error(Errc::WrongRank, vertex_name(rep, vertex) + " has rank " + std::to_string(rep.vertex(vertex).rank()));
  Realization r = realize(rep, f);
  auto l = f.local(vertex);
  if (!l) throw Error(Errc::InvalidSubdiagram, vertex_name(rep, vertex) + " is not in F");
  const RatMatrix& rho = r.coactions[*l].rho;
  SigmaElement s;
  s.host = f;
  s.vertex = vertex;
  s.coords = rho.col(0);
  // with the generator -g: ρ(-g) = σ' ⊗ (-g)
  RatVector again = rho * RatVector{-1};
  for (auto& x : again) x /= -1;
  s.generator_independent = again == s.coords;
  RatMatrix sig = RatMatrix::column(s.coords);
  s.group_like = r.coalgebra.delta * sig == kron(sig, sig) && r.coalgebra.counit * sig == RatMatrix::identity(1);
  return s;
}

SigmaSystem sigma_directed_system(const DiagramRep& rep, const ProductStructure& ps, std::size_t vertex,
                                  const std::vector<Subdiagram>& chain, std::size_t depth) {
  SigmaSystem sys;
  if (depth == 0) return sys;
  if (chain.size() < depth + 1) throw Error(Errc::MissingProducts, "chain shorter than the requested depth");
  const Subdiagram s = Subdiagram::full(rep, {vertex});
  const RatMatrix sigma = RatMatrix::column(sigma_element(rep, s, vertex).coords);
  for (std::size_t k = 0; k < depth; ++k) {
    ProductFragment frag = product_on_truncations(rep, ps, s, chain[k], chain[k + 1]);
    const std::size_t d = frag.right_algebra.dimension();
    sys.steps.push_back({frag.mu * kron(sigma, RatMatrix::identity(d)), {}});
  }
  for (std::size_t k = 0; k < depth; ++k) {
    RatMatrix c = sys.steps[k].times_sigma;
    for (std::size_t j = k + 1; j < depth; ++j) c = sys.steps[j].times_sigma * c;
    if (c.cols() == 0) continue;
    RatMatrix ker = c.rows() == 0 ? RatMatrix::identity(c.cols()) : rational_kernel(c);
    for (std::size_t j = 0; j < ker.cols(); ++j) sys.steps[k].kernel.push_back(ker.col(j));
  }
  return sys;
}

}  // namespace nori
