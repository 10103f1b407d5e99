#pragma once

// Filtrations by dimension, very good pairs, the cellular complex
// h_i(F_i, F_{i-1}) with triple boundaries, and the search for very good
// refinements.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nori/simplicial.hpp"

namespace nori {

/// F_0 ⊆ F_1 ⊆ ... ⊆ F_n = X with dim F_i ≤ i.  F_i = ∅ for i < 0 and X for i > n.
class Filtration {
 public:
  Filtration() = default;
  /// Throws InvalidFiltration unless the levels are nested subcomplexes of X,
  /// satisfy the dimension bound and the last one equals X.
  Filtration(SimplicialComplex x, std::vector<SimplicialComplex> levels);
  /// ∅ ⊆ ... ⊆ ∅ ⊆ X with X in degree dim X.
  static Filtration trivial(const SimplicialComplex& x);
  /// F_i = i-skeleton.
  static Filtration skeletal(const SimplicialComplex& x);

  const SimplicialComplex& space() const { return x_; }
  const SimplicialComplex& level(int i) const;
  /// Minimal n with F_n = X; -1 for the empty space.
  int length() const;
  const std::vector<SimplicialComplex>& levels() const { return levels_; }
  /// True when every level of `other` contains the corresponding level here.
  bool refined_by(const Filtration& other) const;

 private:
  SimplicialComplex x_;
  std::vector<SimplicialComplex> levels_;
  SimplicialComplex empty_;
};

struct VeryGoodReport {
  bool very_good = false;
  bool dimension_ok = false;
  bool equal_low_dimension = false;  // the X = Z, dim X < n clause
  bool free = false;
  bool concentrated = false;
  std::vector<FgModule> homology;      // h_k(X, Z; Z), k = 0..dim X
  std::vector<int> offending_degrees;  // nonzero degrees other than n, or degrees with torsion
  std::string reason;
};

/// Throws InvalidPair unless Z ⊆ X.
VeryGoodReport is_very_good_pair(const SimplicialComplex& x, const SimplicialComplex& z, int n);

struct FiltrationReport {
  bool very_good = true;
  std::vector<VeryGoodReport> levels;  // (F_i, F_{i-1}, i)
};
FiltrationReport is_very_good(const Filtration& f);

/// h_i(F_i, F_{i-1}) in degree i with the triple boundaries as differentials.
struct FiltrationComplex {
  Ring ring = Ring::Z;
  std::vector<RelativeHomology> pieces;  // (F_i, F_{i-1})
  std::vector<FgModule> terms;
  std::vector<ModuleMap> differentials;  // [i] : terms[i] -> terms[i-1]; [0] is the zero map to 0
  bool all_free() const;
  Subquotient homology_at(int i) const;
  std::vector<FgModule> homology() const;
};

/// Throws TorsionTerm when `require_free` and some term has torsion.
FiltrationComplex filtration_complex(const Filtration& f, Ring ring, bool require_free = false);

struct FiltrationComparison {
  bool very_good = false;  // when false the comparison is advisory
  std::vector<FgModule> complex_homology;
  std::vector<FgModule> space_homology;
  std::vector<bool> match;
  bool all_match() const;
};

FiltrationComparison compare_filtration_homology(const Filtration& f, Ring ring);

struct FiltrationPushforward {
  Filtration target;
  std::vector<ModuleMap> maps;  // degree i: h_i(F_i, F_{i-1}) -> h_i(G_i, G_{i-1})
  bool commutes = true;         // with the differentials
};

/// G_i = f(F_i) for i < dim Y and G_i = Y from dim Y on.
FiltrationPushforward pushforward_filtration(const SimplicialMap& f, const Filtration& source, Ring ring);

struct ProductFiltration {
  ProductIndex index;
  Filtration filtration;  // (F x G)_i = ∪_{p+q=i} F_p x G_q
  /// Degree n: ⊕_{p+q=n} term_p(F) ⊗ term_q(G) -> term_n(F x G), basis ordered by p then (a, b).
  std::vector<IntMatrix> kunneth;
  std::vector<IntMatrix> tensor_differentials;  // [n] : tensor_n -> tensor_{n-1}
  FiltrationComplex product_complex;
  bool chain_map = true;
};

/// The Künneth map is the cross product of relative cycles through the
/// shuffle map.  Over Z every term must be free (TorsionTerm otherwise).
ProductFiltration product_filtration(const Filtration& f, const Filtration& g, Ring ring);

struct RefinementResult {
  std::optional<Filtration> filtration;
  std::size_t candidates_tested = 0;
  std::string report;
};

/// Descending search for a very good G ⊇ F.  At each level the candidates
/// Z ⊇ F_{n-1} of dimension ≤ n-1 are enumerated by simplex count, ties broken
/// lexicographically in the canonical simplex order; the first very good one
/// wins.  Candidates are tested in parallel batches.  Throws BudgetExceeded
/// when more than `budget` candidates would be needed.
RefinementResult find_very_good_refinement(const Filtration& f, std::size_t budget);

}  // namespace nori
