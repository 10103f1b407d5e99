#pragma once

// Corpus files: named complexes, pairs, maps and everything built from them.
// The format is described in docs/corpus-format.md.

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "nori/bialgebra.hpp"
#include "nori/filtration.hpp"

namespace nori::cli {

using json = nlohmann::ordered_json;

template <class T>
struct Named {
  std::string name;
  T value;
};

struct TripleSpec {
  std::string x, z, w;
};
struct CupSpec {
  std::string x, z1, z2;
  int p = 0, q = 0;
};
struct CoverSpec {
  std::string x;
  std::vector<std::string> cover, components;
};
struct ProductSpec {
  std::string left, right;
};
struct SubdiagramSpec {
  std::string diagram;
  std::optional<std::vector<std::string>> vertices;  // none = all
  std::optional<std::vector<std::string>> edges;     // none = full
};
struct TransitionSpec {
  std::string small, big;
};
struct BialgebraSpec {
  std::string f, h;
  std::optional<std::string> k;
};
struct SigmaSpec {
  std::string subdiagram, vertex;
};
struct SigmaSystemSpec {
  std::string vertex;
  std::vector<std::string> chain;
};

struct Corpus {
  std::string path;
  std::string digest;  // FNV-1a 64 of the file bytes, hex
  std::vector<Named<SimplicialComplex>> complexes;
  std::vector<Named<SimplicialPair>> pairs;
  std::vector<Named<SimplicialMap>> maps;
  std::vector<Named<TripleSpec>> triples;
  std::vector<Named<CupSpec>> cups;
  std::vector<Named<CoverSpec>> covers;
  std::vector<Named<Filtration>> filtrations;
  std::vector<Named<ProductSpec>> products;
  std::vector<Named<json>> diagrams;
  std::vector<Named<SubdiagramSpec>> subdiagrams;
  std::vector<Named<TransitionSpec>> transitions;
  std::vector<Named<BialgebraSpec>> bialgebras;
  std::vector<Named<SigmaSpec>> sigmas;
  std::vector<Named<SigmaSystemSpec>> sigma_systems;
  std::vector<Named<json>> comodules;

  const SimplicialComplex& complex(const std::string& name) const;
  const SimplicialPair& pair(const std::string& name) const;
  const SimplicialMap& map(const std::string& name) const;
  const SubdiagramSpec& subdiagram(const std::string& name) const;
  const json& diagram(const std::string& name) const;
};

std::string fnv1a64(const std::string& bytes);

/// Throws Error(InvalidInput) on malformed files and lets library validation
/// errors through.
Corpus load_corpus(const std::string& path);
Corpus parse_corpus(const std::string& text, const std::string& path = "<memory>");

RatMatrix parse_matrix(const json& j);
json matrix_json(const RatMatrix& m);
json matrix_json(const IntMatrix& m);
json vector_json(const RatVector& v);
json module_json(const FgModule& m);

struct BuiltDiagram {
  DiagramRep rep;
  ProductStructure products;
};

/// Pairs diagrams get homology representations over `ring`; with
/// "products": true the Künneth data and swap edges are attached.
BuiltDiagram build_diagram(const Corpus& c, const std::string& name, Ring ring);
Subdiagram resolve_subdiagram(const Corpus& c, const BuiltDiagram& d, const std::string& name);

}  // namespace nori::cli
