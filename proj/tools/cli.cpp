#include "cli.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "nori/comodule.hpp"

namespace nori::cli {

namespace {

struct Check {
  std::string name;
  std::string status;  // pass, fail, skipped
  std::string witness;
};

struct Entry {
  std::string name;
  json data = json::object();
  std::vector<Check> checks;
  std::vector<std::string> lines;
  int error_exit = kOk;
  std::string error;

  void check(std::string what, bool ok, std::string witness = {}) {
    checks.push_back({std::move(what), ok ? "pass" : "fail", ok ? std::string() : std::move(witness)});
  }
  void line(std::string s) { lines.push_back(std::move(s)); }
  bool failed() const {
    return std::any_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == "fail"; });
  }
};

bool math_error(Errc code) {
  switch (code) {
    case Errc::AxiomViolation:
    case Errc::ProductEscape:
    case Errc::IntegralEscape:
    case Errc::BudgetExceeded:
    case Errc::TorsionTerm:
    case Errc::NonFreeVertex:
    case Errc::NotGoodPair:
    case Errc::CompositionNonzero:
    case Errc::TorsionPresent:
    case Errc::IllDefinedMap:
    case Errc::NotACycle:
      return true;
    default:
      return false;
  }
}

std::string module_text(const FgModule& m) {
  std::string s = "free rank " + std::to_string(m.free_rank);
  if (!m.torsion.empty()) {
    s += ", torsion ";
    for (std::size_t i = 0; i < m.torsion.size(); ++i) s += (i ? " + Z/" : "Z/") + m.torsion[i].get_str();
  }
  return s;
}

std::string matrix_text(const RatMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " []";
  std::string s = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += i ? "; " : "";
    for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? " " : "") + m(i, j).get_str();
  }
  return s + "]";
}
std::string matrix_text(const IntMatrix& m) { return matrix_text(to_rational(m)); }

FgModule module_at(const std::vector<FgModule>& ms, std::size_t n) { return n < ms.size() ? ms[n] : FgModule{}; }

json map_json(const ModuleMap& f) {
  json j;
  j["source"] = module_json(f.source());
  j["target"] = module_json(f.target());
  j["matrix"] = matrix_json(f.matrix());
  return j;
}

bool exact_in(const ExactnessNode& n, Ring ring) { return n.composite_zero && (ring == Ring::Z ? n.exact_z : n.exact_q); }

// ---------------------------------------------------------------------------

class Context {
 public:
  Context(const Corpus& c, const Options& o, Ring r) : corpus(c), opts(o), ring(r) {}

  const Corpus& corpus;
  const Options& opts;
  Ring ring;

  void prepare(const std::set<std::string>& names) {
    std::vector<std::string> list(names.begin(), names.end());
    std::vector<std::optional<BuiltDiagram>> built(list.size());
    std::vector<std::optional<Error>> errors(list.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < list.size(); ++i) {
      try {
        built[i] = build_diagram(corpus, list[i], ring);
      } catch (const Error& e) {
        errors[i] = e;
      } catch (const std::exception& e) {
        errors[i] = Error(Errc::InvalidInput, e.what());
      }
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (built[i]) diagrams_.emplace(list[i], std::move(*built[i]));
      if (errors[i]) errors_.emplace(list[i], *errors[i]);
    }
  }

  const BuiltDiagram& diagram(const std::string& name) const {
    if (auto it = errors_.find(name); it != errors_.end()) throw it->second;
    if (auto it = diagrams_.find(name); it != diagrams_.end()) return it->second;
    throw Error(Errc::InvalidInput, "diagram '" + name + "' was not prepared");
  }
  const BuiltDiagram& diagram_of(const std::string& subdiagram) const {
    return diagram(corpus.subdiagram(subdiagram).diagram);
  }
  Subdiagram sub(const std::string& name) const { return resolve_subdiagram(corpus, diagram_of(name), name); }

 private:
  std::map<std::string, BuiltDiagram> diagrams_;
  std::map<std::string, Error> errors_;
};

struct Command {
  std::function<std::vector<std::string>(const Corpus&)> entries;
  std::function<std::set<std::string>(const Corpus&, const std::string&)> diagrams;
  std::function<void(const Context&, const std::string&, Entry&)> run;
};

template <class T>
std::vector<std::string> names_of(const std::vector<Named<T>>& items) {
  std::vector<std::string> out;
  for (const auto& it : items) out.push_back(it.name);
  return out;
}

template <class T>
const T& get(const std::vector<Named<T>>& items, const std::string& name) {
  for (const auto& it : items)
    if (it.name == name) return it.value;
  throw Error(Errc::InvalidInput, "unknown entry '" + name + "'");
}

std::set<std::string> no_diagrams(const Corpus&, const std::string&) { return {}; }

// --- topology ---------------------------------------------------------------

void run_homology(const Context& ctx, const std::string& name, Entry& e) {
  const SimplicialPair& p = ctx.corpus.pair(name);
  RelativeHomology rh(p, ctx.ring);
  const int top = std::max(p.X.dimension(), 0);
  json rows = json::array();
  for (int n = 0; n <= top; ++n) {
    FgModule m = n <= rh.top_degree() ? rh.module(n) : FgModule{};
    e.line("n=" + std::to_string(n) + ": " + module_text(m));
    rows.push_back(module_json(m));
  }
  e.data["homology"] = std::move(rows);
}

void run_les(const Context& ctx, const std::string& name, Entry& e) {
  auto cert = les_exactness(ctx.corpus.pair(name));
  json nodes = json::array();
  for (const auto& n : cert.nodes) {
    const bool ok = exact_in(n, ctx.ring);
    e.check("exact at " + n.module, ok,
            "rank im " + std::to_string(n.rank_image) + ", rank ker " + std::to_string(n.rank_kernel));
    e.line(n.module + ": " + (ok ? "exact" : "NOT exact") + " (rank im " + std::to_string(n.rank_image) +
           ", rank ker " + std::to_string(n.rank_kernel) + ")");
    json j;
    j["module"] = n.module;
    j["degree"] = n.degree;
    j["composite_zero"] = n.composite_zero;
    j["exact_q"] = n.exact_q;
    j["exact_z"] = n.exact_z;
    j["rank_image"] = n.rank_image;
    j["rank_kernel"] = n.rank_kernel;
    nodes.push_back(std::move(j));
  }
  e.data["nodes"] = std::move(nodes);
}

void run_triple(const Context& ctx, const std::string& name, Entry& e) {
  const TripleSpec& t = get(ctx.corpus.triples, name);
  const auto &x = ctx.corpus.complex(t.x), &z = ctx.corpus.complex(t.z), &w = ctx.corpus.complex(t.w);
  const SimplicialPair xw(x, w), xz(x, z), zw(z, w);
  const SimplicialMap inc = SimplicialMap::inclusion(z, x), id = SimplicialMap::identity(x);
  json maps = json::array();
  for (int n = 1; n <= x.dimension(); ++n) {
    ModuleMap d = triple_boundary(x, z, w, n, ctx.ring);
    e.line("n=" + std::to_string(n) + ": h_" + std::to_string(n) + "(X,Z) = " + d.source().str() + " -> h_" +
           std::to_string(n - 1) + "(Z,W) = " + d.target().str() + ", " + matrix_text(d.matrix()));
    json j = map_json(d);
    j["n"] = n;
    maps.push_back(std::move(j));
    ModuleMap jn = induced_map_on_homology(id, xw, xz, n, ctx.ring);
    ModuleMap in = induced_map_on_homology(inc, zw, xw, n - 1, ctx.ring);
    e.check("exact at h_" + std::to_string(n) + "(X,Z)", exact_in(exactness_at(jn, d), ctx.ring));
    e.check("exact at h_" + std::to_string(n - 1) + "(Z,W)", exact_in(exactness_at(d, in), ctx.ring));
  }
  e.data["boundaries"] = std::move(maps);
}

std::vector<FgModule> homology_all(const SimplicialPair& p, Ring ring, int top) {
  RelativeHomology rh(p, ring);
  std::vector<FgModule> out;
  for (int n = 0; n <= top; ++n) out.push_back(n <= rh.top_degree() ? rh.module(n) : FgModule{});
  return out;
}

void run_product(const Context& ctx, const std::string& name, Entry& e) {
  const ProductSpec& s = get(ctx.corpus.products, name);
  const SimplicialPair &a = ctx.corpus.pair(s.left), &b = ctx.corpus.pair(s.right);
  ProductPair pp = product_pair(a, b);
  const int top = std::max(pp.pair.X.dimension(), 0);
  e.data["vertices"] = pp.pair.X.count(0);
  e.data["simplices"] = pp.pair.X.size();
  e.line("X: " + std::to_string(pp.pair.X.count(0)) + " vertices, " + std::to_string(pp.pair.X.size()) + " simplices");
  auto h = homology_all(pp.pair, ctx.ring, top);
  json rows = json::array();
  for (int n = 0; n <= top; ++n) {
    e.line("n=" + std::to_string(n) + ": " + module_text(h[n]));
    rows.push_back(module_json(h[n]));
  }
  e.data["homology"] = std::move(rows);
  auto hq = homology_all(pp.pair, Ring::Q, top);
  auto ha = homology_all(a, Ring::Q, top), hb = homology_all(b, Ring::Q, top);
  for (int n = 0; n <= top; ++n) {
    std::size_t expect = 0;
    for (int p = 0; p <= n; ++p) expect += ha[p].free_rank * hb[n - p].free_rank;
    e.check("Künneth rank in degree " + std::to_string(n), hq[n].free_rank == expect,
            "dim " + std::to_string(hq[n].free_rank) + ", expected " + std::to_string(expect));
  }
}

void run_kunneth(const Context& ctx, const std::string& name, Entry& e) {
  const ProductSpec& s = get(ctx.corpus.products, name);
  EzAw maps = ez_aw_maps(ctx.corpus.pair(s.left), ctx.corpus.pair(s.right), ctx.ring);
  EzAwCertificate c = check_ez_aw(maps);
  e.data["max_degree"] = c.max_degree;
  json shapes = json::array();
  for (std::size_t n = 0; n < maps.ez.size(); ++n) {
    shapes.push_back(json::array({maps.ez[n].rows(), maps.ez[n].cols()}));
    e.line("n=" + std::to_string(n) + ": EZ " + std::to_string(maps.ez[n].rows()) + "x" +
           std::to_string(maps.ez[n].cols()));
  }
  e.data["ez_shapes"] = std::move(shapes);
  e.check("EZ chain map", c.ez_chain_map);
  e.check("AW chain map", c.aw_chain_map);
  e.check("AW∘EZ = id", c.aw_ez_identity);
  e.check("EZ∘AW = id on homology", c.ez_aw_homology_identity);
}

void run_cup(const Context& ctx, const std::string& name, Entry& e) {
  const CupSpec& s = get(ctx.corpus.cups, name);
  CupProduct cp = relative_cup_product(ctx.corpus.complex(s.x), ctx.corpus.complex(s.z1),
                                       ctx.corpus.complex(s.z2), s.p, s.q, ctx.ring);
  e.data["left"] = module_json(cp.left);
  e.data["right"] = module_json(cp.right);
  e.data["target"] = module_json(cp.target);
  e.data["table"] = matrix_json(cp.table);
  e.line("h^" + std::to_string(s.p) + " x h^" + std::to_string(s.q) + " -> h^" + std::to_string(s.p + s.q) + ": " +
         cp.left.str() + " x " + cp.right.str() + " -> " + cp.target.str());
  e.line("table " + matrix_text(cp.table));
  e.check("comparison isomorphism", cp.comparison_iso);
}

void run_cech(const Context& ctx, const std::string& name, Entry& e) {
  const CoverSpec& s = get(ctx.corpus.covers, name);
  const SimplicialComplex& x = ctx.corpus.complex(s.x);
  std::vector<SimplicialComplex> cover, comps;
  for (const auto& n : s.cover) cover.push_back(ctx.corpus.complex(n));
  SimplicialComplex divisor;
  for (const auto& n : s.components) {
    comps.push_back(ctx.corpus.complex(n));
    divisor = complex_union(divisor, comps.back());
  }
  CechComplex cc = cech_total_complex(x, cover, comps, ctx.ring);
  const int top = std::max<int>(static_cast<int>(cc.homology.size()) - 1, std::max(x.dimension(), 0));
  auto rel = homology_all(SimplicialPair(x, divisor), ctx.ring, top);
  e.data["terms"] = cc.terms.size();
  json rows = json::array();
  for (int n = 0; n <= top; ++n) {
    FgModule h = module_at(cc.homology, n);
    e.line("n=" + std::to_string(n) + ": " + module_text(h));
    e.check("degree " + std::to_string(n) + " matches h(X, D)", h == rel[n],
            "total " + h.str() + ", relative " + rel[n].str());
    rows.push_back(module_json(h));
  }
  e.data["homology"] = std::move(rows);
}

json levels_json(const Filtration& f) {
  json out = json::array();
  for (const auto& l : f.levels()) out.push_back(l.str());
  return out;
}

void run_filtration(const Context& ctx, const std::string& name, Entry& e) {
  const Filtration& f = get(ctx.corpus.filtrations, name);
  FiltrationReport r = is_very_good(f);
  FiltrationComplex fc = filtration_complex(f, ctx.ring);
  e.data["very_good"] = r.very_good;
  json levels = json::array();
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    json j;
    j["level"] = i;
    j["very_good"] = r.levels[i].very_good;
    j["reason"] = r.levels[i].reason;
    j["term"] = module_json(module_at(fc.terms, i));
    levels.push_back(std::move(j));
    e.line("level " + std::to_string(i) + ": term " + module_text(module_at(fc.terms, i)) +
           (r.levels[i].very_good ? ", very good" : ", not very good: " + r.levels[i].reason));
  }
  e.data["levels"] = std::move(levels);
  json diffs = json::array();
  for (const auto& d : fc.differentials) diffs.push_back(matrix_json(d.matrix()));
  e.data["differentials"] = std::move(diffs);
}

void compare_checks(const FiltrationComparison& c, Entry& e) {
  json rows = json::array();
  for (std::size_t n = 0; n < c.match.size(); ++n) {
    const FgModule a = module_at(c.complex_homology, n), b = module_at(c.space_homology, n);
    const std::string what = "degree " + std::to_string(n);
    const std::string witness = "complex " + a.str() + ", space " + b.str();
    if (c.very_good) {
      e.check(what, c.match[n], witness);
    } else {
      e.checks.push_back({what, "skipped", c.match[n] ? "" : "advisory mismatch: " + witness});
    }
    e.line("n=" + std::to_string(n) + ": complex " + module_text(a) + " | space " + module_text(b));
    json j;
    j["complex"] = module_json(a);
    j["space"] = module_json(b);
    j["match"] = static_cast<bool>(c.match[n]);
    rows.push_back(std::move(j));
  }
  e.data["degrees"] = std::move(rows);
}

void run_compare(const Context& ctx, const std::string& name, Entry& e) {
  auto c = compare_filtration_homology(get(ctx.corpus.filtrations, name), ctx.ring);
  e.data["very_good"] = c.very_good;
  if (!c.very_good) e.line("filtration is not very good; comparison is advisory");
  compare_checks(c, e);
}

void run_search(const Context& ctx, const std::string& name, Entry& e) {
  auto r = find_very_good_refinement(get(ctx.corpus.filtrations, name), ctx.opts.budget);
  e.data["candidates_tested"] = r.candidates_tested;
  e.data["report"] = r.report;
  e.line("candidates tested: " + std::to_string(r.candidates_tested));
  e.check("very good refinement found", r.filtration.has_value(), r.report);
  if (!r.filtration) return;
  e.data["levels"] = levels_json(*r.filtration);
  for (std::size_t i = 0; i < r.filtration->levels().size(); ++i)
    e.line("F_" + std::to_string(i) + " = " + r.filtration->levels()[i].str());
  auto c = compare_filtration_homology(*r.filtration, ctx.ring);
  e.check("refinement is very good", c.very_good);
  compare_checks(c, e);
}

// --- diagrams ---------------------------------------------------------------

std::set<std::string> subdiagram_diagrams(const Corpus& c, const std::string& name) {
  return {c.subdiagram(name).diagram};
}

void run_end_algebra(const Context& ctx, const std::string& name, Entry& e) {
  const auto& d = ctx.diagram_of(name);
  EndAlgebra a = end_algebra(d.rep, ctx.sub(name));
  e.data["dimension"] = a.dimension();
  e.line("dimension " + std::to_string(a.dimension()));
  json basis = json::array();
  for (std::size_t k = 0; k < a.dimension(); ++k) {
    json blocks = json::object();
    std::string text = "e" + std::to_string(k) + ":";
    for (std::size_t l = 0; l < a.subdiagram().vertices.size(); ++l) {
      const std::string& label = d.rep.vertex(a.subdiagram().vertices[l]).label;
      RatMatrix b = a.block(a.family(k), l);
      blocks[label] = matrix_json(b);
      text += " " + label + " " + matrix_text(b);
    }
    basis.push_back(std::move(blocks));
    e.line(text);
  }
  e.data["basis"] = std::move(basis);
  e.data["unit"] = vector_json(a.unit());
  if (a.ring() == Ring::Z) e.check("basis spans a saturated lattice", a.saturated());
}

void run_coalgebra(const Context& ctx, const std::string& name, Entry& e) {
  CoalgebraTrunc c = dual_coalgebra(end_algebra(ctx.diagram_of(name).rep, ctx.sub(name)));
  e.data["rank"] = c.rank;
  e.data["delta"] = matrix_json(c.delta);
  e.data["counit"] = matrix_json(c.counit);
  e.line("rank " + std::to_string(c.rank));
  e.line("counit " + matrix_text(c.counit));
  e.check("coassociative", c.coassociative());
  e.check("counital", c.counital());
}

void run_coaction(const Context& ctx, const std::string& name, Entry& e) {
  const auto& d = ctx.diagram_of(name);
  Realization r = realize(d.rep, ctx.sub(name));
  json out = json::object();
  for (const auto& c : r.coactions) {
    const std::string& label = d.rep.vertex(c.vertex).label;
    out[label] = matrix_json(c.rho);
    e.line(label + ": rank " + std::to_string(c.rank) + ", rho " + matrix_text(c.rho));
    e.check(label + " coassociative", comodule_coassociative(r.coalgebra, c.rho, c.rank));
    e.check(label + " counital", comodule_counital(r.coalgebra, c.rho, c.rank));
  }
  const Subdiagram& s = r.algebra.subdiagram();
  for (std::size_t ei : s.edges) {
    const RepEdge& edge = d.rep.edge(ei);
    const auto& rv = r.coactions[*s.local(edge.source)].rho;
    const auto& rw = r.coactions[*s.local(edge.target)].rho;
    e.check(edge.label + " is a comodule map", comodule_morphism(r.coalgebra, rv, rw, edge.matrix));
  }
  e.data["coactions"] = std::move(out);
}

void run_transition(const Context& ctx, const std::string& name, Entry& e) {
  const TransitionSpec& s = get(ctx.corpus.transitions, name);
  Transition t = transition_map(ctx.diagram_of(s.small).rep, ctx.sub(s.small), ctx.sub(s.big));
  e.data["matrix"] = matrix_json(t.matrix);
  e.line(s.small + " -> " + s.big + ": " + matrix_text(t.matrix));
  e.check("coalgebra morphism", t.coalgebra_morphism);
  e.check("coactions compatible", t.coactions_compatible);
}

std::string joined(const std::vector<std::string>& xs) {
  std::string s;
  for (const auto& x : xs) s += (s.empty() ? "" : ", ") + x;
  return s;
}

void run_factorization(const Context& ctx, const std::string& name, Entry& e) {
  auto c = factorization_check(ctx.diagram_of(name).rep, ctx.sub(name));
  e.check("every vertex is a comodule", c.comodule_failures.empty(), joined(c.comodule_failures));
  e.check("every edge is a comodule map", c.edge_failures.empty(), joined(c.edge_failures));
  e.check("forgetting recovers T", c.forgetful_failures.empty(), joined(c.forgetful_failures));
  e.line(c.passed() ? "T factors through comodules" : "factorization fails");
}

void run_bialgebra(const Context& ctx, const std::string& name, Entry& e) {
  const BialgebraSpec& s = get(ctx.corpus.bialgebras, name);
  const auto& d = ctx.diagram_of(s.f);
  std::optional<Subdiagram> k;
  if (s.k) k = ctx.sub(*s.k);
  auto cert = bialgebra_axiom_check(d.rep, d.products, ctx.sub(s.f), ctx.sub(s.h), k);
  for (const auto& c : cert.checks) {
    e.checks.push_back({c.name, to_string(c.status), c.witness});
    e.line(c.name + ": " + to_string(c.status));
  }
}

void run_sigma(const Context& ctx, const std::string& name, Entry& e) {
  const SigmaSpec& s = get(ctx.corpus.sigmas, name);
  const auto& d = ctx.diagram_of(s.subdiagram);
  SigmaElement sig = sigma_element(d.rep, ctx.sub(s.subdiagram), d.rep.vertex_index(s.vertex));
  e.data["coordinates"] = vector_json(sig.coords);
  e.line("sigma = " + matrix_text(RatMatrix::column(sig.coords).transpose()));
  e.check("independent of the generator", sig.generator_independent);
  e.check("group-like", sig.group_like);
}

void run_sigma_system(const Context& ctx, const std::string& name, Entry& e) {
  const SigmaSystemSpec& s = get(ctx.corpus.sigma_systems, name);
  const auto& d = ctx.diagram_of(s.chain.front());
  std::vector<Subdiagram> chain;
  for (const auto& n : s.chain) chain.push_back(ctx.sub(n));
  const std::size_t depth = ctx.opts.depth.value_or(s.chain.size() - 1);
  SigmaSystem sys = sigma_directed_system(d.rep, d.products, d.rep.vertex_index(s.vertex), chain, depth);
  e.data["depth"] = depth;
  json steps = json::array();
  for (std::size_t k = 0; k < sys.steps.size(); ++k) {
    const auto& st = sys.steps[k];
    json j;
    j["times_sigma"] = matrix_json(st.times_sigma);
    json ker = json::array();
    for (const auto& v : st.kernel) ker.push_back(vector_json(v));
    j["kernel"] = std::move(ker);
    steps.push_back(std::move(j));
    e.line("step " + std::to_string(k) + ": " + std::to_string(st.times_sigma.cols()) + " -> " +
           std::to_string(st.times_sigma.rows()) + ", killed by sigma^" + std::to_string(depth - k) + ": " +
           std::to_string(st.kernel.size()));
  }
  e.data["steps"] = std::move(steps);
}

// --- comodules ----------------------------------------------------------------

std::set<std::string> comodule_diagrams(const Corpus& c, const std::string& name) {
  const json& j = get(c.comodules, name);
  if (j.contains("subdiagram")) return subdiagram_diagrams(c, j.at("subdiagram").get<std::string>());
  if (j.contains("coalgebra") && j.at("coalgebra") != "trivial")
    return subdiagram_diagrams(c, j.at("coalgebra").get<std::string>());
  return {};
}

std::vector<mpz_class> orders_of(const json& j) {
  if (!j.is_array()) throw Error(Errc::InvalidInput, "orders must be a list of integers");
  std::vector<mpz_class> out;
  for (const auto& x : j) {
    if (!x.is_number_integer() || x.get<long>() < 0) throw Error(Errc::InvalidInput, "orders are integers >= 0");
    out.emplace_back(x.get<long>());
  }
  return out;
}

Comodule build_comodule(const Context& ctx, const std::string& name) {
  const json& j = get(ctx.corpus.comodules, name);
  if (j.contains("subdiagram")) {
    const std::string sub = j.at("subdiagram").get<std::string>();
    const auto& d = ctx.diagram_of(sub);
    if (!j.contains("vertex")) throw Error(Errc::InvalidInput, "comodule '" + name + "' needs a vertex");
    return vertex_comodule(realize(d.rep, ctx.sub(sub)), d.rep.vertex_index(j.at("vertex").get<std::string>()));
  }
  if (!j.contains("coalgebra")) throw Error(Errc::InvalidInput, "comodule '" + name + "' needs a coalgebra");
  const std::string cname = j.at("coalgebra").get<std::string>();
  CoalgebraTrunc c = cname == "trivial" ? trivial_coalgebra(ctx.ring)
                                        : dual_coalgebra(end_algebra(ctx.diagram_of(cname).rep, ctx.sub(cname)));
  if (j.contains("extended")) return extended_comodule(c, orders_of(j.at("extended")));
  if (!j.contains("orders") || !j.contains("rho"))
    throw Error(Errc::InvalidInput, "comodule '" + name + "' needs orders and rho, or extended");
  return Comodule(std::move(c), orders_of(j.at("orders")), parse_matrix(j.at("rho")));
}

void run_comodule_check(const Context& ctx, const std::string& name, Entry& e) {
  Comodule m = build_comodule(ctx, name);
  auto cert = check_comodule_axioms(m);
  e.data["module"] = module_json(m.module());
  e.data["coalgebra_rank"] = m.coalgebra.rank;
  e.line("V = " + m.module().str() + " over a coalgebra of rank " + std::to_string(m.coalgebra.rank));
  e.check("relations preserved", cert.well_defined, cert.witness);
  e.check("coassociative", cert.coassociative, cert.witness);
  e.check("counital", cert.counital, cert.witness);
}

void run_cover(const Context& ctx, const std::string& name, Entry& e) {
  Comodule m = build_comodule(ctx, name);
  TorsionfreeCover tf = torsionfree_cover(m);
  e.data["module"] = module_json(m.module());
  e.data["cover"] = module_json(tf.cover.module());
  e.data["surjection"] = matrix_json(tf.surjection);
  e.data["embedding"] = matrix_json(tf.embedding);
  e.line("E = " + m.module().str() + ", cover " + tf.cover.module().str());
  e.check("cover is torsion free", tf.torsion_free);
  e.check("cover maps onto E", tf.surjective);
  e.check("cover embeds in C ⊗ F(E)", tf.injective);
  e.check("cover is a comodule", tf.axioms.passed(), tf.axioms.witness);
}

const std::map<std::string, Command>& registry() {
  static const std::map<std::string, Command> table = [] {
    std::map<std::string, Command> t;
    auto pairs = [](const Corpus& c) { return names_of(c.pairs); };
    auto products = [](const Corpus& c) { return names_of(c.products); };
    auto filtrations = [](const Corpus& c) { return names_of(c.filtrations); };
    auto subs = [](const Corpus& c) { return names_of(c.subdiagrams); };
    auto comodules = [](const Corpus& c) { return names_of(c.comodules); };
    t["homology"] = {pairs, no_diagrams, run_homology};
    t["les"] = {pairs, no_diagrams, run_les};
    t["triple-boundary"] = {[](const Corpus& c) { return names_of(c.triples); }, no_diagrams, run_triple};
    t["product"] = {products, no_diagrams, run_product};
    t["kunneth"] = {products, no_diagrams, run_kunneth};
    t["cup"] = {[](const Corpus& c) { return names_of(c.cups); }, no_diagrams, run_cup};
    t["cech"] = {[](const Corpus& c) { return names_of(c.covers); }, no_diagrams, run_cech};
    t["filtration"] = {filtrations, no_diagrams, run_filtration};
    t["compare-filtration"] = {filtrations, no_diagrams, run_compare};
    t["very-good-search"] = {filtrations, no_diagrams, run_search};
    t["end-algebra"] = {subs, subdiagram_diagrams, run_end_algebra};
    t["coalgebra"] = {subs, subdiagram_diagrams, run_coalgebra};
    t["coaction"] = {subs, subdiagram_diagrams, run_coaction};
    t["transition"] = {[](const Corpus& c) { return names_of(c.transitions); },
                       [](const Corpus& c, const std::string& n) {
                         return subdiagram_diagrams(c, get(c.transitions, n).small);
                       },
                       run_transition};
    t["factorization-check"] = {subs, subdiagram_diagrams, run_factorization};
    t["bialgebra-check"] = {[](const Corpus& c) { return names_of(c.bialgebras); },
                            [](const Corpus& c, const std::string& n) {
                              return subdiagram_diagrams(c, get(c.bialgebras, n).f);
                            },
                            run_bialgebra};
    t["sigma"] = {[](const Corpus& c) { return names_of(c.sigmas); },
                  [](const Corpus& c, const std::string& n) {
                    return subdiagram_diagrams(c, get(c.sigmas, n).subdiagram);
                  },
                  run_sigma};
    t["sigma-system"] = {[](const Corpus& c) { return names_of(c.sigma_systems); },
                         [](const Corpus& c, const std::string& n) {
                           return subdiagram_diagrams(c, get(c.sigma_systems, n).chain.front());
                         },
                         run_sigma_system};
    t["comodule-check"] = {comodules, comodule_diagrams, run_comodule_check};
    t["torsionfree-cover"] = {comodules, comodule_diagrams, run_cover};
    return t;
  }();
  return table;
}

json entry_json(const Entry& e) {
  json j;
  j["name"] = e.name;
  if (e.error_exit != kOk) {
    j["status"] = "error";
    j["error"] = e.error;
    return j;
  }
  j["status"] = e.failed() ? "fail" : "pass";
  json checks = json::array();
  for (const auto& c : e.checks) {
    json cj;
    cj["name"] = c.name;
    cj["status"] = c.status;
    if (!c.witness.empty()) cj["witness"] = c.witness;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  j["data"] = e.data;
  return j;
}

json corpus_json(const Corpus& c) {
  json j;
  j["path"] = c.path;
  j["fnv1a64"] = c.digest;
  return j;
}

// invalid input dominates a failed check
int combine(int a, int b) { return a == kInvalidInput || b == kInvalidInput ? kInvalidInput : std::max(a, b); }

const char* status_of(int code) { return code == kOk ? "pass" : code == kCheckFailed ? "fail" : "error"; }

RunResult run_one(const Options& opts, const Corpus& corpus, const std::string& command) {
  const Command& cmd = registry().at(command);
  const Ring ring = opts.ring.value_or(default_ring(command));
  RunResult out;
  std::vector<std::string> names;
  try {
    names = cmd.entries(corpus);
  } catch (const Error& e) {
    out.exit_code = kInvalidInput;
    out.table = std::string("error: ") + e.what() + "\n";
    return out;
  }
  if (opts.only) {
    if (std::find(names.begin(), names.end(), *opts.only) == names.end()) {
      out.exit_code = kInvalidInput;
      out.table = "error: no entry '" + *opts.only + "' for " + command + "\n";
      out.certificate["command"] = command;
      out.certificate["ring"] = to_string(ring);
      out.certificate["results"] = json::array();
      out.certificate["status"] = "error";
      return out;
    }
    names = {*opts.only};
  }

  Context ctx(corpus, opts, ring);
  std::vector<Entry> entries(names.size());
  {
    std::set<std::string> diagrams;
    for (std::size_t i = 0; i < names.size(); ++i) {
      entries[i].name = names[i];
      try {
        auto d = cmd.diagrams(corpus, names[i]);
        diagrams.insert(d.begin(), d.end());
      } catch (const Error&) {
        // reported when the entry runs
      }
    }
    ctx.prepare(diagrams);
  }

#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Entry& e = entries[i];
    try {
      cmd.run(ctx, e.name, e);
    } catch (const Error& err) {
      e.error_exit = math_error(err.code()) ? kCheckFailed : kInvalidInput;
      e.error = err.what();
    } catch (const std::exception& err) {
      e.error_exit = kInvalidInput;
      e.error = err.what();
    }
  }

  std::ostringstream table;
  json results = json::array();
  for (const auto& e : entries) {
    table << command << " " << e.name << " (ring " << to_string(ring) << ")\n";
    for (const auto& l : e.lines) table << "  " << l << "\n";
    int code = e.error_exit;
    if (code == kOk && e.failed()) code = kCheckFailed;
    for (const auto& c : e.checks)
      if (c.status == "fail") table << "  FAILED " << c.name << (c.witness.empty() ? "" : ": " + c.witness) << "\n";
    if (e.error_exit != kOk) table << "  error: " << e.error << "\n";
    table << "  status: " << status_of(code) << "\n";
    out.exit_code = combine(out.exit_code, code);
    results.push_back(entry_json(e));
  }
  out.table = table.str();
  out.certificate["command"] = command;
  out.certificate["ring"] = to_string(ring);
  out.certificate["results"] = std::move(results);
  out.certificate["status"] = status_of(out.exit_code);
  return out;
}

json header(const Options& opts, const Corpus& corpus) {
  json j;
  j["tool"] = "nori";
  j["version"] = kToolVersion;
  j["command"] = opts.command;
  json o;
  if (opts.ring) o["ring"] = to_string(*opts.ring);
  o["budget"] = opts.budget;
  if (opts.depth) o["depth"] = *opts.depth;
  if (opts.only) o["only"] = *opts.only;
  j["options"] = std::move(o);
  j["corpus"] = corpus_json(corpus);
  return j;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "homology",       "les",         "triple-boundary", "product",      "kunneth",
      "cup",            "cech",        "filtration",      "compare-filtration", "very-good-search",
      "end-algebra",    "coalgebra",   "coaction",        "transition",   "factorization-check",
      "bialgebra-check", "sigma",      "sigma-system",    "comodule-check", "torsionfree-cover"};
  return names;
}

Ring default_ring(const std::string& command) {
  static const std::set<std::string> algebra = {"end-algebra",  "coalgebra",       "coaction",
                                                "transition",   "factorization-check", "bialgebra-check",
                                                "sigma",        "sigma-system"};
  return algebra.count(command) ? Ring::Q : Ring::Z;
}

std::string certificate_text(const json& certificate) { return certificate.dump(2) + "\n"; }

RunResult run(const Options& opts) {
  Corpus corpus;
  try {
    corpus = load_corpus(opts.corpus);
  } catch (const std::exception& e) {
    RunResult r;
    r.exit_code = kInvalidInput;
    r.table = std::string("error: ") + e.what() + "\n";
    r.certificate["tool"] = "nori";
    r.certificate["version"] = kToolVersion;
    r.certificate["command"] = opts.command;
    r.certificate["error"] = e.what();
    r.certificate["status"] = "error";
    return r;
  }
  return run(opts, corpus);
}

RunResult run(const Options& opts, const Corpus& corpus) {
  RunResult out;
  out.certificate = header(opts, corpus);
  if (opts.command == "all") {
    json runs = json::array();
    for (const auto& name : command_names()) {
      RunResult r = run_one(opts, corpus, name);
      out.table += "# " + name + "\n" + r.table;
      runs.push_back(std::move(r.certificate));
      out.exit_code = combine(out.exit_code, r.exit_code);
    }
    out.certificate["runs"] = std::move(runs);
    out.certificate["status"] = status_of(out.exit_code);
    return out;
  }
  if (!registry().count(opts.command)) {
    out.exit_code = kInvalidInput;
    out.table = "error: unknown command '" + opts.command + "'\n";
    out.certificate["status"] = "error";
    return out;
  }
  RunResult r = run_one(opts, corpus, opts.command);
  out.exit_code = r.exit_code;
  out.table = std::move(r.table);
  for (auto& [k, v] : r.certificate.items()) out.certificate[k] = v;
  return out;
}

}  // namespace nori::cli
