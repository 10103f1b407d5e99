#pragma once

// Small triangulations shipped with the library.  Vertex labels are 0..n-1.

#include <string>
#include <vector>

#include "nori/simplicial.hpp"

namespace nori::catalog {

/// Maximal simplices of the named space; throws InvalidInput for unknown names.
std::vector<Simplex> facets(const std::string& name);
SimplicialComplex space(const std::string& name);
std::vector<std::string> names();

}  // namespace nori::catalog
