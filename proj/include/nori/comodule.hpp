#pragma once

// Comodules over coalgebra truncations: axiom checks, extended and tensor
// comodules, and the torsion-free cover.
//
// The underlying module is kept as a list of generator orders (0 = free) so
// that tensor constructions keep their kron coordinates; module() gives the
// normalized FgModule.

#include <string>
#include <vector>

#include "nori/bialgebra.hpp"

namespace nori {

struct Comodule {
  CoalgebraTrunc coalgebra;
  std::vector<mpz_class> orders;  // per generator of V
  RatMatrix rho;                  // (rank C * gens) x gens

  Comodule() = default;
  Comodule(CoalgebraTrunc c, std::vector<mpz_class> orders, RatMatrix rho);
  /// Generators of a normalized module: torsion first, then free.
  Comodule(CoalgebraTrunc c, const FgModule& v, RatMatrix rho);

  std::size_t generators() const { return orders.size(); }
  FgModule module() const { return FgModule::from_orders(orders); }
  /// Relation columns order(g) * e_g for the torsion generators.
  IntMatrix relations() const;
};

struct ComoduleCertificate {
  bool well_defined = true;  // ρ maps relations of V into relations of C ⊗ V
  bool coassociative = true;
  bool counital = true;
  std::string witness;
  bool passed() const { return well_defined && coassociative && counital; }
};

/// Identities are checked modulo the relations of V.  Throws DimensionMismatch.
ComoduleCertificate check_comodule_axioms(const Comodule& m);

/// ρ_N f = (id ⊗ f) ρ_M, modulo the relations of C ⊗ N.
bool is_comodule_morphism(const Comodule& m, const Comodule& n, const RatMatrix& f);

/// V = C ⊗ E with ρ = Δ ⊗ id_E.
Comodule extended_comodule(const CoalgebraTrunc& c, const FgModule& e);
Comodule extended_comodule(const CoalgebraTrunc& c, const std::vector<mpz_class>& orders);

/// The coaction itself, V -> C ⊗ V, as a map into extended(C, V).
RatMatrix coaction_embedding(const Comodule& m);

/// The comodule of a diagram vertex under its coaction.
Comodule vertex_comodule(const Realization& r, std::size_t vertex);

/// ρ = (μ ⊗ id)(id ⊗ swap ⊗ id)(ρ_M ⊗ ρ_N) over A_H, for M over A_F and N over A_G.
Comodule tensor_comodules(const Comodule& m, const Comodule& n, const ProductFragment& mu);
/// Computes the fragment first (MissingProducts when products are absent).
Comodule tensor_comodules(const DiagramRep& rep, const ProductStructure& ps, const Subdiagram& f,
                          const Subdiagram& g, const Subdiagram& h, const Comodule& m, const Comodule& n);

struct TorsionfreeCover {
  Comodule cover;
  IntMatrix surjection;  // gens(E) x rank(E'), onto E
  IntMatrix embedding;   // (rank C * gens E) x rank(E'), into C ⊗ F(E)
  bool torsion_free = true;
  bool surjective = true;
  bool injective = true;
  ComoduleCertificate axioms;
};

/// F(E) is the free module on the generators of E; E' is the pullback of
/// ρ: E -> C ⊗ E and id ⊗ η: C ⊗ F(E) -> C ⊗ E, realized inside C ⊗ F(E).
TorsionfreeCover torsionfree_cover(const Comodule& m);

}  // namespace nori
