#include "nori/catalog.hpp"

#include <map>

namespace nori::catalog {

namespace {

// 3x3 grid with opposite sides glued; `twist` reverses the second gluing.
std::vector<Simplex> grid_surface(bool twist) {
  const long n = 3;
  auto v = [&](long i, long j) {
    if (i == n) {
      i = 0;
      if (twist) j = -j;
    }
    return i * n + ((j % n) + n) % n;
  };
  std::vector<Simplex> out;
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      out.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1)});
      out.push_back({v(i, j), v(i, j + 1), v(i + 1, j + 1)});
    }
  return out;
}

const std::map<std::string, std::vector<Simplex>>& table() {
  static const std::map<std::string, std::vector<Simplex>> t = {
      {"point", {{0}}},
      {"interval", {{0, 1}}},
      {"triangle", {{0, 1, 2}}},
      {"tetrahedron", {{0, 1, 2, 3}}},
      {"circle", {{0, 1}, {1, 2}, {0, 2}}},
      {"hexagon", {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}}},
      {"sphere", {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}},
      {"torus", grid_surface(false)},
      {"klein", grid_surface(true)},
      {"rp2",
       {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 1, 5},
        {1, 2, 4}, {2, 3, 5}, {1, 3, 4}, {2, 4, 5}, {1, 3, 5}}},
      {"moebius", {{0, 1, 2}, {1, 2, 3}, {2, 3, 4}, {0, 3, 4}, {0, 1, 4}}},
  };
  return t;
}

}  // namespace

std::vector<Simplex> facets(const std::string& name) {
  auto it = table().find(name);
  if (it == table().end()) throw Error(Errc::InvalidInput, "unknown space '" + name + "'");
  return it->second;
}

SimplicialComplex space(const std::string& name) { return SimplicialComplex::from_maximal(facets(name)); }

std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : table()) out.push_back(k);
  return out;
}

}  // namespace nori::catalog
