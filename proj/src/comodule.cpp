#include "nori/comodule.hpp"

#include <algorithm>

namespace nori {

namespace {

// Every column of d lies in the lattice (Z) or span (Q) of the columns of rel.
bool in_relations(const RatMatrix& d, const IntMatrix& rel, Ring ring) {
  if (d.is_zero()) return true;
  if (rel.cols() == 0) return false;
  if (ring == Ring::Z && !is_integral(d)) return false;
  LatticeSolver solver(rel, ring);
  const IntMatrix di = ring == Ring::Z ? to_integer(d) : IntMatrix();
  for (std::size_t j = 0; j < d.cols(); ++j) {
    if (ring == Ring::Z) {
      if (!solver.contains(di.col(j))) return false;
    } else if (!solver.solve_rational(d.col(j))) {
      return false;
    }
  }
  return true;
}

IntMatrix tensor_relations(std::size_t free_left, const IntMatrix& rel) {
  return kron(IntMatrix::identity(free_left), rel);
}

void check_shape(const Comodule& m) {
  const std::size_t k = m.generators();
  if (m.rho.rows() != m.coalgebra.rank * k || m.rho.cols() != k)
    throw Error(Errc::DimensionMismatch, "coaction is " + std::to_string(m.rho.rows()) + "x" +
                                             std::to_string(m.rho.cols()) + ", expected " +
                                             std::to_string(m.coalgebra.rank * k) + "x" + std::to_string(k));
}

// Rows of ρ_M ⊗ ρ_N reordered from (a, i, b, j) to (a, b, i, j).
RatMatrix middle_swap(const RatMatrix& k, std::size_t f, std::size_t m, std::size_t g, std::size_t n) {
  RatMatrix out(k.rows(), k.cols());
  for (std::size_t a = 0; a < f; ++a)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t b = 0; b < g; ++b)
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t from = ((a * m + i) * g + b) * n + j;
          const std::size_t to = ((a * g + b) * m + i) * n + j;
          for (std::size_t c = 0; c < k.cols(); ++c) out(to, c) = k(from, c);
        }
  return out;
}

}  // namespace

Comodule::Comodule(CoalgebraTrunc c, std::vector<mpz_class> o, RatMatrix r)
    : coalgebra(std::move(c)), orders(std::move(o)), rho(std::move(r)) {}

Comodule::Comodule(CoalgebraTrunc c, const FgModule& v, RatMatrix r) : coalgebra(std::move(c)), rho(std::move(r)) {
  for (std::size_t g = 0; g < v.generators(); ++g) orders.push_back(v.order(g));
}

IntMatrix Comodule::relations() const {
  std::size_t t = std::count_if(orders.begin(), orders.end(), [](const mpz_class& o) { return o != 0; });
  IntMatrix r(orders.size(), t);
  std::size_t c = 0;
  for (std::size_t g = 0; g < orders.size(); ++g)
    if (orders[g] != 0) r(g, c++) = orders[g];
  return r;
}

ComoduleCertificate check_comodule_axioms(const Comodule& m) {
  check_shape(m);
  ComoduleCertificate cert;
  const CoalgebraTrunc& c = m.coalgebra;
  const std::size_t k = m.generators();
  const Ring ring = c.ring;
  const IntMatrix rel = m.relations();
  const RatMatrix id_k = RatMatrix::identity(k);

  cert.well_defined = in_relations(m.rho * to_rational(rel), tensor_relations(c.rank, rel), ring);
  RatMatrix coassoc = kron(c.delta, id_k) * m.rho - kron(RatMatrix::identity(c.rank), m.rho) * m.rho;
  cert.coassociative = in_relations(coassoc, tensor_relations(c.rank * c.rank, rel), ring);
  RatMatrix counit = kron(c.counit, id_k) * m.rho - id_k;
  cert.counital = in_relations(counit, rel, ring);

  if (!cert.well_defined) cert.witness += "relations of V are not sent to relations of C⊗V; ";
  if (!cert.coassociative) cert.witness += "(Δ⊗id)ρ - (id⊗ρ)ρ is not zero; ";
  if (!cert.counital) cert.witness += "(ε⊗id)ρ - id is not zero; ";
  return cert;
}

bool is_comodule_morphism(const Comodule& m, const Comodule& n, const RatMatrix& f) {
  check_shape(m);
  check_shape(n);
  if (m.coalgebra.rank != n.coalgebra.rank || f.rows() != n.generators() || f.cols() != m.generators())
    throw Error(Errc::DimensionMismatch, "comodule morphism shapes");
  RatMatrix d = n.rho * f - kron(RatMatrix::identity(m.coalgebra.rank), f) * m.rho;
  return in_relations(d, tensor_relations(n.coalgebra.rank, n.relations()), m.coalgebra.ring);
}

Comodule extended_comodule(const CoalgebraTrunc& c, const std::vector<mpz_class>& orders) {
  std::vector<mpz_class> o;
  for (std::size_t a = 0; a < c.rank; ++a) o.insert(o.end(), orders.begin(), orders.end());
  Comodule m(c, std::move(o), kron(c.delta, RatMatrix::identity(orders.size())));
  if (!check_comodule_axioms(m).passed()) throw Error(Errc::AxiomViolation, "extended comodule fails the axioms");
  return m;
}

Comodule extended_comodule(const CoalgebraTrunc& c, const FgModule& e) {
  std::vector<mpz_class> orders;
  for (std::size_t g = 0; g < e.generators(); ++g) orders.push_back(e.order(g));
  return extended_comodule(c, orders);
}

RatMatrix coaction_embedding(const Comodule& m) {
  check_shape(m);
  return m.rho;
}

Comodule vertex_comodule(const Realization& r, std::size_t vertex) {
  auto l = r.algebra.subdiagram().local(vertex);
  if (!l) throw Error(Errc::InvalidSubdiagram, "vertex not in the realization");
  const Coaction& c = r.coactions[*l];
  return Comodule(r.coalgebra, FgModule::free(c.rank), c.rho);
}

Comodule tensor_comodules(const Comodule& m, const Comodule& n, const ProductFragment& frag) {
  check_shape(m);
  check_shape(n);
  const std::size_t f = m.coalgebra.rank, g = n.coalgebra.rank;
  if (frag.mu.cols() != f * g)
    throw Error(Errc::DimensionMismatch, "product fragment does not match the coalgebras");
  const std::size_t a = m.generators(), b = n.generators();
  std::vector<mpz_class> orders;
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) orders.push_back(gcd(m.orders[i], n.orders[j]));
  RatMatrix rho = kron(frag.mu, RatMatrix::identity(a * b)) * middle_swap(kron(m.rho, n.rho), f, a, g, b);
  return Comodule(dual_coalgebra(frag.target_algebra), std::move(orders), std::move(rho));
}

Comodule tensor_comodules(const DiagramRep& rep, const ProductStructure& ps, const Subdiagram& f,
                          const Subdiagram& g, const Subdiagram& h, const Comodule& m, const Comodule& n) {
  return tensor_comodules(m, n, product_on_truncations(rep, ps, f, g, h));
}

TorsionfreeCover torsionfree_cover(const Comodule& m) {
  check_shape(m);
  const CoalgebraTrunc& c = m.coalgebra;
  if (!is_integral(m.rho) || !is_integral(c.delta) || !is_integral(c.counit))
    throw Error(Errc::NotIntegral, "torsion-free cover needs integral structure maps");
  const std::size_t k = m.generators();
  const IntMatrix rho = to_integer(m.rho);
  const IntMatrix rel = m.relations();
  const IntMatrix big_rel = tensor_relations(c.rank, rel);

  TorsionfreeCover out;
  // E' = {y in C⊗F(E) : y ≡ ρ(x) mod C⊗R}, spanned by ρ and the relations
  const IntMatrix gens = hconcat(rho, big_rel);
  out.embedding = lattice_basis(gens);
  const std::size_t r = out.embedding.cols();

  out.surjection = IntMatrix(k, r);
  LatticeSolver solver(gens, Ring::Z);
  for (std::size_t j = 0; j < r; ++j) {
    auto x = solver.solve_integer(out.embedding.col(j));
    if (!x) throw Error(Errc::AxiomViolation, "basis vector of the pullback has no preimage");
    for (std::size_t i = 0; i < k; ++i) {
      mpz_class v = (*x)[i];
      if (m.orders[i] != 0) mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), m.orders[i].get_mpz_t());
      out.surjection(i, j) = v;
    }
  }

  // coaction of E' inside the extended comodule C⊗F(E)
  const IntMatrix ext = to_integer(kron(c.delta, RatMatrix::identity(k))) * out.embedding;
  const IntMatrix inside = kron(IntMatrix::identity(c.rank), out.embedding);
  LatticeSolver sub(inside, Ring::Z);
  RatMatrix rho_cover(c.rank * r, r);
  for (std::size_t j = 0; j < r; ++j) {
    auto x = sub.solve_integer(ext.col(j));
    if (!x) throw Error(Errc::AxiomViolation, "pullback is not a subcomodule");
    for (std::size_t i = 0; i < x->size(); ++i) rho_cover(i, j) = (*x)[i];
  }
  out.cover = Comodule(c, std::vector<mpz_class>(r, 0), std::move(rho_cover));

  out.torsion_free = out.cover.module().is_free() && rank(out.embedding) == r;
  out.injective = rank(out.embedding) == r;
  {
    IntMatrix onto = hconcat(out.surjection, rel);
    auto s = smith_normal_form(onto, {.track_left = false, .track_right = false});
    out.surjective = s.rank == k &&
                     std::all_of(s.diagonal.begin(), s.diagonal.end(), [](const mpz_class& d) { return d == 1; });
  }
  out.axioms = check_comodule_axioms(out.cover);
  return out;
}

}  // namespace nori
