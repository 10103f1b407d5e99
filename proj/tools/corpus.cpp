#include "corpus.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nori/catalog.hpp"

namespace nori::cli {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::InvalidInput, what); }

template <class T>
const T& lookup(const std::vector<Named<T>>& items, const std::string& name, const char* kind) {
  for (const auto& it : items)
    if (it.name == name) return it.value;
  bad(std::string("unknown ") + kind + " '" + name + "'");
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where + ": missing field '" + key + "'");
  return j.at(key);
}

std::string str_field(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) bad(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> names_field(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_array()) bad(where + ": field '" + key + "' must be a list of names");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) bad(where + ": field '" + key + "' must be a list of names");
    out.push_back(e.get<std::string>());
  }
  return out;
}

long int_value(const json& v, const std::string& where) {
  if (!v.is_number_integer()) bad(where + ": expected an integer");
  return v.get<long>();
}

std::vector<Simplex> simplices_value(const json& v, const std::string& where) {
  if (!v.is_array()) bad(where + ": expected a list of simplices");
  std::vector<Simplex> out;
  for (const auto& s : v) {
    if (!s.is_array() || s.empty()) bad(where + ": simplices are non-empty vertex lists");
    Simplex simplex;
    for (const auto& x : s) simplex.push_back(int_value(x, where));
    out.push_back(std::move(simplex));
  }
  return out;
}

// Every entry of a section is an object with a unique "name".
template <class F>
void each_entry(const json& root, const char* section, F&& f) {
  if (!root.contains(section)) return;
  const json& list = root.at(section);
  if (!list.is_array()) bad(std::string("section '") + section + "' must be a list");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& e = list[i];
    const std::string where = std::string(section) + "[" + std::to_string(i) + "]";
    const std::string name = str_field(e, "name", where);
    if (!seen.insert(name).second) bad(where + ": duplicate name '" + name + "'");
    f(name, e, where + " '" + name + "'");
  }
}

SimplicialComplex parse_complex(const Corpus& c, const json& e, const std::string& where) {
  if (e.contains("catalog")) return catalog::space(str_field(e, "catalog", where));
  if (e.contains("product")) {
    auto f = names_field(e, "product", where);
    if (f.size() != 2) bad(where + ": product takes two complexes");
    return product_pair(SimplicialPair::absolute(c.complex(f[0])), SimplicialPair::absolute(c.complex(f[1])))
        .pair.X;
  }
  if (e.contains("facets")) {
    std::vector<Vertex> extra;
    if (e.contains("vertices"))
      for (const auto& v : e.at("vertices")) extra.push_back(int_value(v, where));
    return SimplicialComplex::from_maximal(simplices_value(e.at("facets"), where), extra);
  }
  bad(where + ": a complex needs 'catalog', 'facets' or 'product'");
}

const std::set<std::string> known_sections = {
    "format",     "complexes",    "pairs",       "maps",        "triples",     "cups",
    "covers",     "filtrations",  "products",    "diagrams",    "subdiagrams", "transitions",
    "bialgebras", "sigmas",       "sigma_systems", "comodules"};

}  // namespace

const SimplicialComplex& Corpus::complex(const std::string& name) const { return lookup(complexes, name, "complex"); }
const SimplicialPair& Corpus::pair(const std::string& name) const { return lookup(pairs, name, "pair"); }
const SimplicialMap& Corpus::map(const std::string& name) const { return lookup(maps, name, "map"); }
const SubdiagramSpec& Corpus::subdiagram(const std::string& name) const {
  return lookup(subdiagrams, name, "subdiagram");
}
const json& Corpus::diagram(const std::string& name) const { return lookup(diagrams, name, "diagram"); }

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot read corpus '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str(), path);
}

Corpus parse_corpus(const std::string& text, const std::string& path) {
  Corpus c;
  c.path = path;
  c.digest = fnv1a64(text);
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("corpus is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) bad("corpus must be a JSON object");
  for (const auto& [key, _] : root.items())
    if (!known_sections.count(key)) bad("unknown section '" + key + "'");
  if (root.contains("format") && root.at("format") != "nori-corpus/1") bad("unsupported format version");

  each_entry(root, "complexes", [&](const std::string& name, const json& e, const std::string& where) {
    c.complexes.push_back({name, parse_complex(c, e, where)});
  });
  each_entry(root, "pairs", [&](const std::string& name, const json& e, const std::string& where) {
    if (e.contains("product")) {
      auto f = names_field(e, "product", where);
      if (f.size() != 2) bad(where + ": product takes two pairs");
      c.pairs.push_back({name, product_pair(c.pair(f[0]), c.pair(f[1])).pair});
      return;
    }
    SimplicialComplex z = e.contains("Z") ? c.complex(str_field(e, "Z", where)) : SimplicialComplex{};
    c.pairs.push_back({name, SimplicialPair(c.complex(str_field(e, "X", where)), std::move(z))});
  });
  each_entry(root, "maps", [&](const std::string& name, const json& e, const std::string& where) {
    std::map<Vertex, Vertex> assignment;
    const json& v = field(e, "vertices", where);
    if (!v.is_array()) bad(where + ": 'vertices' is a list of [from, to]");
    for (const auto& kv : v) {
      if (!kv.is_array() || kv.size() != 2) bad(where + ": 'vertices' is a list of [from, to]");
      assignment[int_value(kv[0], where)] = int_value(kv[1], where);
    }
    c.maps.push_back({name, SimplicialMap(c.complex(str_field(e, "source", where)),
                                          c.complex(str_field(e, "target", where)), std::move(assignment))});
  });
  each_entry(root, "triples", [&](const std::string& name, const json& e, const std::string& where) {
    TripleSpec t{str_field(e, "X", where), str_field(e, "Z", where), str_field(e, "W", where)};
    if (!c.complex(t.w).is_subcomplex_of(c.complex(t.z)) || !c.complex(t.z).is_subcomplex_of(c.complex(t.x)))
      throw Error(Errc::NotNested, where + ": need X ⊇ Z ⊇ W");
    c.triples.push_back({name, t});
  });
  each_entry(root, "cups", [&](const std::string& name, const json& e, const std::string& where) {
    CupSpec s{str_field(e, "X", where), str_field(e, "Z1", where), str_field(e, "Z2", where),
              static_cast<int>(int_value(field(e, "p", where), where)),
              static_cast<int>(int_value(field(e, "q", where), where))};
    c.complex(s.x), c.complex(s.z1), c.complex(s.z2);
    c.cups.push_back({name, s});
  });
  each_entry(root, "covers", [&](const std::string& name, const json& e, const std::string& where) {
    CoverSpec s{str_field(e, "X", where), names_field(e, "cover", where), {}};
    if (e.contains("components")) s.components = names_field(e, "components", where);
    c.complex(s.x);
    for (const auto& n : s.cover) c.complex(n);
    for (const auto& n : s.components) c.complex(n);
    c.covers.push_back({name, std::move(s)});
  });
  each_entry(root, "filtrations", [&](const std::string& name, const json& e, const std::string& where) {
    const SimplicialComplex& x = c.complex(str_field(e, "space", where));
    if (e.contains("kind")) {
      const std::string kind = str_field(e, "kind", where);
      if (kind == "trivial") return c.filtrations.push_back({name, Filtration::trivial(x)});
      if (kind == "skeletal") return c.filtrations.push_back({name, Filtration::skeletal(x)});
      bad(where + ": kind is 'trivial' or 'skeletal'");
    }
    std::vector<SimplicialComplex> levels;
    for (const auto& n : names_field(e, "levels", where)) levels.push_back(c.complex(n));
    c.filtrations.push_back({name, Filtration(x, std::move(levels))});
  });
  each_entry(root, "products", [&](const std::string& name, const json& e, const std::string& where) {
    ProductSpec s{str_field(e, "left", where), str_field(e, "right", where)};
    c.pair(s.left), c.pair(s.right);
    c.products.push_back({name, s});
  });
  each_entry(root, "diagrams", [&](const std::string& name, const json& e, const std::string&) {
    c.diagrams.push_back({name, e});
  });
  each_entry(root, "subdiagrams", [&](const std::string& name, const json& e, const std::string& where) {
    SubdiagramSpec s{str_field(e, "diagram", where), {}, {}};
    c.diagram(s.diagram);
    if (e.contains("vertices")) s.vertices = names_field(e, "vertices", where);
    if (e.contains("edges")) s.edges = names_field(e, "edges", where);
    c.subdiagrams.push_back({name, std::move(s)});
  });
  each_entry(root, "transitions", [&](const std::string& name, const json& e, const std::string& where) {
    TransitionSpec s{str_field(e, "small", where), str_field(e, "big", where)};
    if (c.subdiagram(s.small).diagram != c.subdiagram(s.big).diagram)
      bad(where + ": both subdiagrams must live in one diagram");
    c.transitions.push_back({name, s});
  });
  each_entry(root, "bialgebras", [&](const std::string& name, const json& e, const std::string& where) {
    BialgebraSpec s{str_field(e, "F", where), str_field(e, "H", where), {}};
    if (e.contains("K")) s.k = str_field(e, "K", where);
    const std::string& d = c.subdiagram(s.f).diagram;
    if (c.subdiagram(s.h).diagram != d || (s.k && c.subdiagram(*s.k).diagram != d))
      bad(where + ": all subdiagrams must live in one diagram");
    c.bialgebras.push_back({name, std::move(s)});
  });
  each_entry(root, "sigmas", [&](const std::string& name, const json& e, const std::string& where) {
    SigmaSpec s{str_field(e, "subdiagram", where), str_field(e, "vertex", where)};
    c.subdiagram(s.subdiagram);
    c.sigmas.push_back({name, s});
  });
  each_entry(root, "sigma_systems", [&](const std::string& name, const json& e, const std::string& where) {
    SigmaSystemSpec s{str_field(e, "vertex", where), names_field(e, "chain", where)};
    if (s.chain.empty()) bad(where + ": empty chain");
    for (const auto& n : s.chain)
      if (c.subdiagram(n).diagram != c.subdiagram(s.chain[0]).diagram)
        bad(where + ": the chain must live in one diagram");
    c.sigma_systems.push_back({name, std::move(s)});
  });
  each_entry(root, "comodules", [&](const std::string& name, const json& e, const std::string&) {
    c.comodules.push_back({name, e});
  });
  return c;
}

RatMatrix parse_matrix(const json& j) {
  if (!j.is_array()) bad("a matrix is a list of rows");
  std::vector<RatVector> rows;
  std::size_t cols = 0;
  for (const auto& r : j) {
    if (!r.is_array()) bad("a matrix is a list of rows");
    RatVector row;
    for (const auto& x : r) {
      if (x.is_number_integer()) {
        row.emplace_back(x.get<long>());
      } else if (x.is_string()) {
        mpq_class q;
        if (q.set_str(x.get<std::string>(), 10) != 0 || q.get_den() == 0) bad("bad rational '" + x.get<std::string>() + "'");
        q.canonicalize();
        row.push_back(q);
      } else {
        bad("matrix entries are integers or \"p/q\" strings");
      }
    }
    if (!rows.empty() && row.size() != cols) bad("ragged matrix");
    cols = row.size();
    rows.push_back(std::move(row));
  }
  return RatMatrix::from_rows(rows);
}

namespace {

json number(const mpz_class& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

json number(const mpq_class& q) {
  if (q.get_den() == 1) return number(q.get_num());
  return q.get_str();
}

}  // namespace

json matrix_json(const RatMatrix& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json matrix_json(const IntMatrix& m) { return matrix_json(to_rational(m)); }

json vector_json(const RatVector& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(number(x));
  return out;
}

json module_json(const FgModule& m) {
  json t = json::array();
  for (const auto& x : m.torsion) t.push_back(number(x));
  json out;
  out["free_rank"] = m.free_rank;
  out["torsion"] = std::move(t);
  return out;
}

BuiltDiagram build_diagram(const Corpus& c, const std::string& name, Ring ring) {
  const json& d = c.diagram(name);
  const std::string where = "diagram '" + name + "'";
  BuiltDiagram out;
  if (d.contains("ranks")) {
    out.rep = DiagramRep(ring);
    const json& ranks = d.at("ranks");
    if (!ranks.is_array()) bad(where + ": 'ranks' must be a list");
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      const long r = int_value(ranks[i], where);
      if (r < 0) bad(where + ": negative rank");
      RepVertex v;
      v.label = "v" + std::to_string(i);
      v.module = FgModule::free(static_cast<std::size_t>(r));
      out.rep.add_vertex(std::move(v));
    }
    if (d.contains("edges"))
      for (std::size_t i = 0; i < d.at("edges").size(); ++i) {
        const json& e = d.at("edges")[i];
        RepEdge edge;
        edge.label = e.contains("label") ? str_field(e, "label", where) : "e" + std::to_string(i);
        edge.kind = EdgeKind::Explicit;
        edge.source = out.rep.vertex_index(str_field(e, "source", where));
        edge.target = out.rep.vertex_index(str_field(e, "target", where));
        edge.matrix = parse_matrix(field(e, "matrix", where));
        out.rep.add_edge(std::move(edge));
      }
    return out;
  }

  PairsDiagramSpec spec;
  for (const auto& v : field(d, "vertices", where)) {
    spec.vertices.push_back({str_field(v, "label", where), c.pair(str_field(v, "pair", where)),
                             static_cast<int>(int_value(field(v, "degree", where), where))});
  }
  if (d.contains("maps"))
    for (const auto& m : d.at("maps"))
      spec.maps.push_back({str_field(m, "label", where), str_field(m, "source", where),
                           str_field(m, "target", where), c.map(str_field(m, "map", where))});
  if (d.contains("triples"))
    for (const auto& t : d.at("triples"))
      spec.triples.push_back({str_field(t, "label", where), str_field(t, "source", where),
                              str_field(t, "target", where)});
  out.rep = build_pairs_diagram(spec, ring);
  if (d.value("products", false)) {
    out.products = product_structure(out.rep);
    add_swap_edges(out.rep, out.products);
  }
  return out;
}

Subdiagram resolve_subdiagram(const Corpus& c, const BuiltDiagram& d, const std::string& name) {
  const SubdiagramSpec& s = c.subdiagram(name);
  std::vector<std::size_t> vertices;
  if (s.vertices) {
    for (const auto& l : *s.vertices) vertices.push_back(d.rep.vertex_index(l));
  } else {
    for (std::size_t i = 0; i < d.rep.vertices().size(); ++i) vertices.push_back(i);
  }
  if (!s.edges) return Subdiagram::full(d.rep, std::move(vertices));
  std::vector<std::size_t> edges;
  for (const auto& l : *s.edges) edges.push_back(d.rep.edge_index(l));
  return Subdiagram::with_edges(d.rep, std::move(vertices), std::move(edges));
}

}  // namespace nori::cli
