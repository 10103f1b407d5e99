#pragma once

// Monoidal layer: Künneth isomorphisms τ on good pairs, the product on
// coalgebra truncations, bialgebra axiom checks, the element σ and the
// multiplication-by-σ directed system.

#include <optional>
#include <string>
#include <vector>

#include "nori/tannaka.hpp"

namespace nori {

/// h_i(X, Z) = 0 for i != n and h_n(X, Z) free, over the ring of `rep`.
bool is_good_vertex(const DiagramRep& rep, std::size_t v);
/// ({pt}, ∅, 0): the unit object.
bool is_unit_vertex(const DiagramRep& rep, std::size_t v);

struct TauIso {
  std::size_t left = 0, right = 0, product = 0;
  RatMatrix matrix;   // T(v×w) -> T(v) ⊗ T(w), from Alexander-Whitney
  RatMatrix inverse;  // from Eilenberg-Zilber (cross product of generators)
};

/// Finds the vertex whose pair is v × w in degree n + m.  Throws
/// MissingProducts if there is none and NotGoodPair unless all three are good.
TauIso kunneth_tau(const DiagramRep& rep, std::size_t v, std::size_t w);

/// All τ's available in a diagram: every ordered (v, w) of good vertices whose
/// product vertex is present.
struct ProductStructure {
  std::vector<TauIso> taus;
  const TauIso* find(std::size_t v, std::size_t w) const;
};
ProductStructure product_structure(const DiagramRep& rep);

/// Adds the swap edge v×w -> w×v (a loop when v = w) for every τ whose
/// mirror is present.  Returns the number of edges added.
std::size_t add_swap_edges(DiagramRep& rep, const ProductStructure& ps);

struct ProductFragment {
  Subdiagram left, right, target;
  EndAlgebra left_algebra, right_algebra, target_algebra;
  RatMatrix pi;  // End_H -> End_F ⊗ End_G, (dim F * dim G) x dim H
  RatMatrix mu;  // A_F ⊗ A_G -> A_H, the transpose
};

/// φ ↦ (τ φ_{v×w} τ^{-1})_{v,w} read in End_F ⊗ End_G.  Throws MissingProducts
/// when some v×w is absent from H, ProductEscape when an image leaves the
/// tensor subspace, IntegralEscape when over Z it only lands rationally.
ProductFragment product_on_truncations(const DiagramRep& rep, const ProductStructure& ps,
                                       const Subdiagram& f, const Subdiagram& g, const Subdiagram& h);

enum class CheckStatus { Pass, Fail, Skipped };
const char* to_string(CheckStatus s);

struct AxiomCheck {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string witness;
};

struct BialgebraCertificate {
  std::vector<AxiomCheck> checks;
  bool passed() const;
};

/// Multiplicativity of Δ and ε, unit (when F has a unit vertex), commutativity
/// and, if `k` is given, associativity of μ: A_F ⊗ A_F -> A_H.
BialgebraCertificate bialgebra_axiom_check(const DiagramRep& rep, const ProductStructure& ps,
                                           const Subdiagram& f, const Subdiagram& h,
                                           const std::optional<Subdiagram>& k = std::nullopt);

struct SigmaElement {
  Subdiagram host;
  std::size_t vertex = 0;
  RatVector coords;                 // in A_F
  bool generator_independent = true;  // recomputed with -g
  bool group_like = true;             // Δσ = σ⊗σ, ε(σ) = 1
};

/// ρ(g) = σ ⊗ g on the rank-one vertex.  Throws WrongRank otherwise.
SigmaElement sigma_element(const DiagramRep& rep, const Subdiagram& f, std::size_t vertex);

struct SigmaStep {
  RatMatrix times_sigma;            // A_{F_k} -> A_{F_{k+1}}
  std::vector<RatVector> kernel;    // killed by σ^{depth-k}
};

struct SigmaSystem {
  std::vector<SigmaStep> steps;
};

/// Needs vertex × v in F_{k+1} for every v in F_k (MissingProducts).
SigmaSystem sigma_directed_system(const DiagramRep& rep, const ProductStructure& ps, std::size_t vertex,
                                  const std::vector<Subdiagram>& chain, std::size_t depth);

}  // namespace nori
