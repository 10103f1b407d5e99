#pragma once

// Finite simplicial complexes and pairs, relative chains and (co)homology,
// induced maps, long exact sequences, products with the staircase
// triangulation, Eilenberg-Zilber / Alexander-Whitney maps, relative cup
// products and Cech total complexes.
//
// Orientation: a simplex is stored with its vertices in increasing order and
// ∂[v0..vn] = Σ (-1)^i [v0..v̂i..vn].  Chains are indexed by the canonical
// order of simplices (by dimension, then lexicographically).

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nori/linalg.hpp"

namespace nori {

using Vertex = long;
using Simplex = std::vector<Vertex>;

class SimplicialComplex {
 public:
  SimplicialComplex() = default;

  /// Face closure of the given simplices (each is sorted and deduplicated).
  static SimplicialComplex from_maximal(const std::vector<Simplex>& simplices,
                                        const std::vector<Vertex>& extra_vertices = {});
  /// Requires the list to be closed under faces; throws InvalidComplex otherwise.
  static SimplicialComplex from_simplices(const std::vector<Simplex>& simplices);

  int dimension() const { return static_cast<int>(by_dim_.size()) - 1; }
  bool empty() const { return by_dim_.empty(); }
  std::size_t count(int dim) const;
  std::size_t size() const { return index_.size(); }
  const std::vector<Simplex>& simplices(int dim) const;
  std::vector<Simplex> all_simplices() const;
  std::vector<Vertex> vertices() const;
  std::optional<std::size_t> index_of(const Simplex& s) const;
  bool contains(const Simplex& s) const { return index_.count(s) != 0; }
  bool is_subcomplex_of(const SimplicialComplex& other) const;
  SimplicialComplex skeleton(int k) const;
  std::string str() const;

  friend bool operator==(const SimplicialComplex& a, const SimplicialComplex& b) {
    return a.by_dim_ == b.by_dim_;
  }

 private:
  std::vector<std::vector<Simplex>> by_dim_;
  std::map<Simplex, std::size_t> index_;  // index within its dimension
};

SimplicialComplex complex_union(const SimplicialComplex& a, const SimplicialComplex& b);
SimplicialComplex complex_intersection(const SimplicialComplex& a, const SimplicialComplex& b);
/// Faces of a full simplex on the given vertices.
SimplicialComplex full_simplex(const std::vector<Vertex>& vertices);
/// Boundary of a full simplex.
SimplicialComplex simplex_boundary(const std::vector<Vertex>& vertices);

struct SimplicialPair {
  SimplicialComplex X;
  SimplicialComplex Z;

  SimplicialPair() = default;
  /// Throws InvalidPair unless Z ⊆ X.
  SimplicialPair(SimplicialComplex x, SimplicialComplex z);
  static SimplicialPair absolute(SimplicialComplex x) { return {std::move(x), SimplicialComplex{}}; }
  /// Simplices of X not in Z, in canonical order.
  std::vector<Simplex> relative_basis(int dim) const;
};

/// Vertex assignment; every simplex must map onto a simplex of the target.
class SimplicialMap {
 public:
  SimplicialMap() = default;
  SimplicialMap(SimplicialComplex source, SimplicialComplex target, std::map<Vertex, Vertex> assignment);
  static SimplicialMap identity(const SimplicialComplex& x);
  static SimplicialMap inclusion(const SimplicialComplex& sub, const SimplicialComplex& x);

  const SimplicialComplex& source() const { return source_; }
  const SimplicialComplex& target() const { return target_; }
  const std::map<Vertex, Vertex>& assignment() const { return assignment_; }
  Vertex operator()(Vertex v) const { return assignment_.at(v); }

  /// Image simplex (sorted, repeated vertices removed).
  Simplex image(const Simplex& s) const;
  /// Oriented image: sign of the sorting permutation, or 0 if degenerate.
  std::pair<Simplex, int> oriented_image(const Simplex& s) const;
  SimplicialComplex image_complex(const SimplicialComplex& sub) const;

 private:
  SimplicialComplex source_;
  SimplicialComplex target_;
  std::map<Vertex, Vertex> assignment_;
};

/// g ∘ f
SimplicialMap compose(const SimplicialMap& g, const SimplicialMap& f);

/// Homological chain complex of free modules: boundary(n) maps degree n to n-1.
class ChainComplex {
 public:
  ChainComplex() = default;
  /// boundaries[n] has shape rank(n-1) x rank(n); boundaries[0] is 0 x rank(0).
  /// Throws InvalidComplex if some ∂∘∂ is nonzero.
  ChainComplex(std::vector<IntMatrix> boundaries, Ring ring);

  Ring ring() const { return ring_; }
  int top_degree() const { return static_cast<int>(ranks_.size()) - 1; }
  std::size_t rank(int n) const;
  /// Zero matrices outside the stored range.
  IntMatrix boundary(int n) const;
  Subquotient homology(int n) const;
  /// Free rank / torsion at every degree 0..top.
  std::vector<FgModule> homology_modules() const;

 private:
  std::vector<IntMatrix> boundaries_;
  std::vector<std::size_t> ranks_;
  Ring ring_ = Ring::Z;
};

ChainComplex relative_chain_complex(const SimplicialPair& p, Ring ring);

/// Relative chains with homology in every degree and the simplex bookkeeping
/// needed to push chains between pairs.
class RelativeHomology {
 public:
  RelativeHomology(SimplicialPair pair, Ring ring);

  const SimplicialPair& pair() const { return pair_; }
  const ChainComplex& chains() const { return chains_; }
  Ring ring() const { return ring_; }
  int top_degree() const { return chains_.top_degree(); }
  const std::vector<Simplex>& basis(int n) const;
  std::optional<std::size_t> basis_index(const Simplex& s) const;
  const Subquotient& degree(int n) const;
  FgModule module(int n) const;

 private:
  SimplicialPair pair_;
  Ring ring_;
  ChainComplex chains_;
  std::vector<std::vector<Simplex>> basis_;
  std::map<Simplex, std::size_t> basis_index_;
  std::vector<Subquotient> degrees_;
  Subquotient empty_;
};

FgModule relative_homology(const SimplicialPair& p, int n, Ring ring);

/// Matrix of f_#: C_n(X,Z) -> C_n(X',Z'); requires f(Z) ⊆ Z' (NotPairMap).
IntMatrix chain_map(const SimplicialMap& f, const RelativeHomology& src, const RelativeHomology& tgt, int n);
ModuleMap induced_map(const SimplicialMap& f, const RelativeHomology& src, const RelativeHomology& tgt, int n);
ModuleMap induced_map_on_homology(const SimplicialMap& f, const SimplicialPair& src,
                                  const SimplicialPair& tgt, int n, Ring ring);

/// Connecting map h_n(X,Z) -> h_{n-1}(Z,W) of the triple X ⊇ Z ⊇ W.
ModuleMap triple_boundary(const RelativeHomology& xz, const RelativeHomology& zw, int n);
ModuleMap triple_boundary(const SimplicialComplex& x, const SimplicialComplex& z,
                          const SimplicialComplex& w, int n, Ring ring);

// ---------------------------------------------------------------------------
// Long exact sequence of a pair

struct ExactnessNode {
  std::string module;  // e.g. "h_1(X)"
  int degree = 0;
  bool composite_zero = true;
  bool exact_q = true;  // rank(im) == rank(ker)
  bool exact_z = true;  // im == ker as submodules, torsion included
  std::size_t rank_image = 0;
  std::size_t rank_kernel = 0;
};

struct LesCertificate {
  std::vector<ExactnessNode> nodes;
  bool exact() const;
};

/// ... -> h_n(Z) -> h_n(X) -> h_n(X,Z) -> h_{n-1}(Z) -> ...
LesCertificate les_exactness(const SimplicialPair& p);

/// Checks ker(g) == im(f) for A -f-> M -g-> B.
ExactnessNode exactness_at(const ModuleMap& f, const ModuleMap& g);

// ---------------------------------------------------------------------------
// Products

/// Vertex (x, y) of X × Y gets id ix * |V(Y)| + iy with ix, iy the ranks of x
/// and y among the vertices of the ambient factors.  This order is the
/// product order, so staircase simplices come out sorted.
class ProductIndex {
 public:
  ProductIndex() = default;
  ProductIndex(std::vector<Vertex> left, std::vector<Vertex> right);
  Vertex id(Vertex x, Vertex y) const;
  std::pair<Vertex, Vertex> coords(Vertex v) const;
  const std::vector<Vertex>& left() const { return left_; }
  const std::vector<Vertex>& right() const { return right_; }

 private:
  std::vector<Vertex> left_, right_;
  std::map<Vertex, std::size_t> left_rank_, right_rank_;
};

/// Staircase triangulation of A × B, vertex ids from `index`.
SimplicialComplex product_complex(const SimplicialComplex& a, const SimplicialComplex& b,
                                  const ProductIndex& index);

struct ProductPair {
  SimplicialPair pair;  // (X1 × X2, X1 × Z2 ∪ Z1 × X2)
  ProductIndex index;
};

ProductPair product_pair(const SimplicialPair& p1, const SimplicialPair& p2);

/// The vertex map X × Y -> Y × X, (x, y) -> (y, x).
SimplicialMap product_swap(const ProductPair& xy, const ProductPair& yx);
/// Projections onto the factors.
SimplicialMap product_projection(const ProductPair& xy, const SimplicialComplex& factor, bool left);

/// (C ⊗ D)_n = ⊕_{p+q=n} C_p ⊗ D_q, basis ordered by p, then (i, j) lexicographically.
/// ∂(a ⊗ b) = ∂a ⊗ b + (-1)^p a ⊗ ∂b.
class TensorComplex {
 public:
  struct Cell {
    int p;
    std::size_t i, j;
  };
  TensorComplex(const ChainComplex& c, const ChainComplex& d);
  const ChainComplex& complex() const { return complex_; }
  const std::vector<Cell>& cells(int n) const;
  std::size_t index(int n, int p, std::size_t i, std::size_t j) const;
  std::size_t offset(int n, int p) const;

 private:
  ChainComplex complex_;
  std::vector<std::vector<Cell>> cells_;
  std::vector<std::map<int, std::size_t>> offsets_;
  std::vector<std::size_t> right_ranks_;
};

struct EzAw {
  RelativeHomology left;
  RelativeHomology right;
  RelativeHomology product;
  ProductIndex index;
  TensorComplex tensor;
  std::vector<IntMatrix> ez;  // degree n: tensor_n -> C_n(product)
  std::vector<IntMatrix> aw;  // degree n: C_n(product) -> tensor_n
};

/// Shuffle (Eilenberg-Zilber) and front/back face (Alexander-Whitney) maps on
/// relative chains of the product pair.
EzAw ez_aw_maps(const SimplicialPair& p1, const SimplicialPair& p2, Ring ring);

/// Signed staircase chain EZ(σ ⊗ τ) as (simplex, coefficient) terms.
std::vector<std::pair<Simplex, int>> shuffle_product(const Simplex& s, const Simplex& t,
                                                     const ProductIndex& index);

struct EzAwCertificate {
  bool ez_chain_map = true;
  bool aw_chain_map = true;
  bool aw_ez_identity = true;
  bool ez_aw_homology_identity = true;
  int max_degree = 0;
};

EzAwCertificate check_ez_aw(const EzAw& maps);

// ---------------------------------------------------------------------------
// Cohomology and cup products

/// Cochains on X relative to Z: C^p = Hom(C_p(X,Z), Λ), coboundary ∂^T.
class RelativeCohomology {
 public:
  RelativeCohomology(SimplicialPair pair, Ring ring);
  const RelativeHomology& chains() const { return chains_; }
  const Subquotient& degree(int p) const;
  FgModule module(int p) const;

 private:
  RelativeHomology chains_;
  std::vector<Subquotient> degrees_;
  Subquotient empty_;
};

/// (α ⌣ β)(σ) = α(front p-face) · β(back q-face) on simplices of X outside Z1 ∪ Z2.
IntVector cup_cochains(const RelativeHomology& left, const IntVector& alpha, int p,
                       const RelativeHomology& right, const IntVector& beta, int q,
                       const RelativeHomology& target);

struct CupProduct {
  FgModule left, right, target;
  int p = 0, q = 0;
  /// target generators x (left generators * right generators); column a * |right| + b.
  IntMatrix table;
  /// Induced map H(X, Z1 ∪ Z2) -> H(X, Z1 + Z2) of the basis projection.
  ModuleMap comparison;
  bool comparison_iso = true;
};

CupProduct relative_cup_product(const SimplicialComplex& x, const SimplicialComplex& z1,
                                const SimplicialComplex& z2, int p, int q, Ring ring);

// ---------------------------------------------------------------------------
// Cech total complexes

struct CechTerm {
  std::vector<std::size_t> cover_indices;      // a0 < ... < ai
  std::vector<std::size_t> component_indices;  // b1 < ... < bj
  SimplicialComplex piece;
};

struct CechComplex {
  ChainComplex total;
  std::vector<CechTerm> terms;
  std::vector<FgModule> homology;
};

/// Total complex of the tricomplex with terms C_k(Y_{a0..ai} ∩ Z_{b1..bj}) in
/// total degree i + j + k; the empty intersection of components is X.
/// Differential: d_cech + (-1)^i d_div + (-1)^{i+j} ∂.
CechComplex cech_total_complex(const SimplicialComplex& x, const std::vector<SimplicialComplex>& cover,
                               const std::vector<SimplicialComplex>& components, Ring ring);

}  // namespace nori
