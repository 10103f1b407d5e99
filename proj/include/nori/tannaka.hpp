#pragma once

// Diagram representations, compatible-endomorphism algebras End(T|F), their
// dual coalgebras A(T|F), coactions, transition maps and the factorization
// certificate.
//
// Conventions.  A family (φ_v) is stored as one vector: the blocks of the
// vertices of F in order, each block row-major.  Tensor indices follow kron:
// the basis vector a ⊗ b of A ⊗ B sits at a * dim B + b.
// The coaction is ρ(x) = Σ_k e_k* ⊗ e_k·x, which makes V a left comodule
// for the comultiplication Δ(e_k*) = Σ_{i,j} c_{ji}^k e_i* ⊗ e_j*, the dual
// of the opposite product (e_i·e_j = Σ_k c_{ij}^k e_k).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nori/simplicial.hpp"

namespace nori {

enum class EdgeKind { Map, Triple, Explicit, Swap };
const char* to_string(EdgeKind kind);

struct RepVertex {
  std::string label;
  FgModule module;
  // set for vertices of the pairs diagram
  std::optional<SimplicialPair> pair;
  int degree = 0;

  std::size_t rank() const { return module.generators(); }
  bool free() const { return module.is_free(); }
};

struct RepEdge {
  std::string label;
  EdgeKind kind = EdgeKind::Explicit;
  std::size_t source = 0;
  std::size_t target = 0;
  RatMatrix matrix;  // rank(target) x rank(source)
};

class DiagramRep {
 public:
  explicit DiagramRep(Ring ring = Ring::Q) : ring_(ring) {}

  Ring ring() const { return ring_; }
  std::size_t add_vertex(RepVertex v);
  std::size_t add_edge(RepEdge e);
  const std::vector<RepVertex>& vertices() const { return vertices_; }
  const std::vector<RepEdge>& edges() const { return edges_; }
  const RepVertex& vertex(std::size_t i) const { return vertices_.at(i); }
  const RepEdge& edge(std::size_t i) const { return edges_.at(i); }
  RepEdge& edge(std::size_t i) { return edges_.at(i); }
  /// Throws InvalidInput for unknown labels.
  std::size_t vertex_index(const std::string& label) const;
  std::size_t edge_index(const std::string& label) const;
  std::optional<std::size_t> find_vertex(const std::string& label) const;

 private:
  Ring ring_;
  std::vector<RepVertex> vertices_;
  std::vector<RepEdge> edges_;
};

/// Plain free representation, e.g. for fixtures: vertex ranks and edge matrices.
DiagramRep explicit_diagram(Ring ring, const std::vector<std::size_t>& ranks,
                            const std::vector<std::tuple<std::size_t, std::size_t, RatMatrix>>& edges);

// ---------------------------------------------------------------------------
// The pairs diagram and its homology representation

struct PairVertexSpec {
  std::string label;
  SimplicialPair pair;
  int degree = 0;
};
struct MapEdgeSpec {
  std::string label;
  std::string source, target;
  SimplicialMap map;
};
struct TripleEdgeSpec {
  std::string label;
  std::string source, target;  // (X,Z,n) -> (Z,W,n-1)
};
struct PairsDiagramSpec {
  std::vector<PairVertexSpec> vertices;
  std::vector<MapEdgeSpec> maps;
  std::vector<TripleEdgeSpec> triples;
};

/// Vertex (X,Z,n) gets h_n(X,Z) with the generators of its subquotient; map
/// edges get induced maps, triple edges the connecting maps.  Torsion is kept
/// in the vertex module (flagged by free() == false).
DiagramRep build_pairs_diagram(const PairsDiagramSpec& spec, Ring ring);

/// Homology class data of a pairs-diagram vertex, recomputed on demand.
RelativeHomology vertex_homology(const RepVertex& v, Ring ring);

// ---------------------------------------------------------------------------
// Subdiagrams and End(T|F)

struct Subdiagram {
  std::vector<std::size_t> vertices;  // sorted
  std::vector<std::size_t> edges;     // sorted, endpoints inside `vertices`

  /// Full subdiagram on the given vertices.
  static Subdiagram full(const DiagramRep& rep, std::vector<std::size_t> vertices);
  /// Explicit edge subset; throws InvalidSubdiagram if an edge leaves the vertex set.
  static Subdiagram with_edges(const DiagramRep& rep, std::vector<std::size_t> vertices,
                               std::vector<std::size_t> edges);
  static Subdiagram whole(const DiagramRep& rep);
  bool contains(const Subdiagram& other) const;
  std::optional<std::size_t> local(std::size_t vertex) const;
};

class EndAlgebra {
 public:
  Ring ring() const { return ring_; }
  const Subdiagram& subdiagram() const { return sub_; }
  std::size_t dimension() const { return basis_.dimension(); }
  std::size_t ambient() const { return basis_.ambient(); }
  std::size_t rank(std::size_t local) const { return ranks_.at(local); }
  std::size_t offset(std::size_t local) const { return offsets_.at(local); }

  /// Basis family k as a block vector.
  RatVector family(std::size_t k) const { return basis_.vector(k); }
  /// Block of vertex `local` (index into subdiagram().vertices) of a family.
  RatMatrix block(const RatVector& family, std::size_t local) const;
  std::optional<RatVector> coordinates(const RatVector& family) const { return basis_.coordinates(family); }
  const EchelonBasis& basis() const { return basis_; }

  /// dim x dim^2; column i*dim + j holds the coordinates of e_i·e_j.
  const RatMatrix& structure_constants() const { return mult_; }
  const RatVector& unit() const { return unit_; }
  /// Over Z: the basis spans a saturated lattice (all invariant factors 1).
  bool saturated() const;

  /// Composition of two families, blockwise.
  RatVector compose(const RatVector& a, const RatVector& b) const;

 private:
  friend EndAlgebra end_algebra(const DiagramRep&, const Subdiagram&);
  Ring ring_ = Ring::Q;
  Subdiagram sub_;
  std::vector<std::size_t> ranks_, offsets_;
  EchelonBasis basis_;
  RatMatrix mult_;
  RatVector unit_;
};

/// Solves T(e)φ_v = φ_w T(e) for every edge of F.  Throws NonFreeVertex when a
/// vertex module has torsion.
EndAlgebra end_algebra(const DiagramRep& rep, const Subdiagram& sub);

/// Constraint matrix of the commutation system (rows: edges x entries, cols: ambient).
RatMatrix commutation_constraints(const DiagramRep& rep, const Subdiagram& sub);

// ---------------------------------------------------------------------------
// Coalgebras and coactions

struct CoalgebraTrunc {
  Ring ring = Ring::Q;
  std::size_t rank = 0;
  RatMatrix delta;   // rank^2 x rank
  RatMatrix counit;  // 1 x rank

  bool coassociative() const;
  bool counital() const;
  /// Throws AxiomViolation unless both hold.
  void verify() const;
};

/// The rank-1 coalgebra Λ with Δ(1) = 1 ⊗ 1 and ε(1) = 1.
CoalgebraTrunc trivial_coalgebra(Ring ring);

CoalgebraTrunc dual_coalgebra(const EndAlgebra& e);

struct Coaction {
  std::size_t vertex = 0;  // index in the diagram
  std::size_t rank = 0;    // rank of T(v)
  RatMatrix rho;           // (dim A * rank) x rank
};

Coaction coaction(const EndAlgebra& e, std::size_t vertex);

bool comodule_coassociative(const CoalgebraTrunc& c, const RatMatrix& rho, std::size_t rank);
bool comodule_counital(const CoalgebraTrunc& c, const RatMatrix& rho, std::size_t rank);
/// ρ_w T = (id ⊗ T) ρ_v
bool comodule_morphism(const CoalgebraTrunc& c, const RatMatrix& rho_v, const RatMatrix& rho_w, const RatMatrix& t);

// ---------------------------------------------------------------------------
// Transitions and factorization

struct Transition {
  RatMatrix matrix;  // dim A_{F'} x dim A_F, dual of restriction
  bool coalgebra_morphism = true;
  bool coactions_compatible = true;
};

/// Requires F ⊆ F' (InvalidSubdiagram).
Transition transition_map(const EndAlgebra& small, const EndAlgebra& big);
Transition transition_map(const DiagramRep& rep, const Subdiagram& small, const Subdiagram& big);

struct Realization {
  EndAlgebra algebra;
  CoalgebraTrunc coalgebra;
  std::vector<Coaction> coactions;  // one per vertex of F, in order
};

Realization realize(const DiagramRep& rep, const Subdiagram& sub);

struct FactorizationCertificate {
  std::vector<std::string> comodule_failures;  // vertex labels
  std::vector<std::string> edge_failures;      // edge labels
  std::vector<std::string> forgetful_failures;
  bool passed() const {
    return comodule_failures.empty() && edge_failures.empty() && forgetful_failures.empty();
  }
};

/// Checks a realization against `rep` (which may differ from the one it was
/// built from, e.g. a corrupted fixture).
FactorizationCertificate factorization_check(const Realization& r, const DiagramRep& rep);
FactorizationCertificate factorization_check(const DiagramRep& rep, const Subdiagram& sub);

}  // namespace nori
