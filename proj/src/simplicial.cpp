#include "nori/simplicial.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace nori {

namespace {

Simplex canonical(Simplex s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

Simplex drop(const Simplex& s, std::size_t i) {
  Simplex f;
  f.reserve(s.size() - 1);
  for (std::size_t k = 0; k < s.size(); ++k)
    if (k != i) f.push_back(s[k]);
  return f;
}

int face_sign(std::size_t i) { return i % 2 == 0 ? 1 : -1; }

const std::vector<Simplex>& no_simplices() {
  static const std::vector<Simplex> none;
  return none;
}

// Maximal simplices, i.e. those that are not a facet of anything.
std::vector<Simplex> maximal_simplices(const SimplicialComplex& c) {
  std::set<Simplex> covered;
  for (int d = 1; d <= c.dimension(); ++d)
    for (const auto& s : c.simplices(d))
      for (std::size_t i = 0; i < s.size(); ++i) covered.insert(drop(s, i));
  std::vector<Simplex> out;
  for (int d = 0; d <= c.dimension(); ++d)
    for (const auto& s : c.simplices(d))
      if (!covered.count(s)) out.push_back(s);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// SimplicialComplex

SimplicialComplex SimplicialComplex::from_maximal(const std::vector<Simplex>& simplices,
                                                  const std::vector<Vertex>& extra_vertices) {
  std::vector<std::set<Simplex>> layers;
  auto add = [&](const Simplex& s) {
    const std::size_t d = s.size() - 1;
    if (layers.size() <= d) layers.resize(d + 1);
    layers[d].insert(s);
  };
  for (const auto& raw : simplices) {
    Simplex s = canonical(raw);
    if (s.empty()) continue;
    if (s.size() > 24) throw Error(Errc::InvalidComplex, "simplex too large");
    const std::size_t k = s.size();
    for (unsigned long mask = 1; mask < (1ul << k); ++mask) {
      Simplex f;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (1ul << i)) f.push_back(s[i]);
      add(f);
    }
  }
  for (Vertex v : extra_vertices) add({v});
  SimplicialComplex c;
  for (auto& layer : layers) {
    c.by_dim_.emplace_back(layer.begin(), layer.end());
    for (std::size_t i = 0; i < c.by_dim_.back().size(); ++i) c.index_[c.by_dim_.back()[i]] = i;
  }
  return c;
}

SimplicialComplex SimplicialComplex::from_simplices(const std::vector<Simplex>& simplices) {
  std::set<Simplex> all;
  for (const auto& s : simplices) {
    if (s.empty()) throw Error(Errc::InvalidComplex, "empty simplex");
    Simplex c = canonical(s);
    if (c.size() != s.size()) throw Error(Errc::InvalidComplex, "simplex with repeated vertex");
    all.insert(c);
  }
  for (const auto& s : all)
    if (s.size() > 1)
      for (std::size_t i = 0; i < s.size(); ++i)
        if (!all.count(drop(s, i))) throw Error(Errc::InvalidComplex, "list is not closed under faces");
  return from_maximal({all.begin(), all.end()});
}

std::size_t SimplicialComplex::count(int dim) const {
  return dim < 0 || dim > dimension() ? 0 : by_dim_[dim].size();
}

const std::vector<Simplex>& SimplicialComplex::simplices(int dim) const {
  return dim < 0 || dim > dimension() ? no_simplices() : by_dim_[dim];
}

std::vector<Simplex> SimplicialComplex::all_simplices() const {
  std::vector<Simplex> out;
  for (const auto& layer : by_dim_) out.insert(out.end(), layer.begin(), layer.end());
  return out;
}

std::vector<Vertex> SimplicialComplex::vertices() const {
  std::vector<Vertex> out;
  for (const auto& s : simplices(0)) out.push_back(s[0]);
  return out;
}

std::optional<std::size_t> SimplicialComplex::index_of(const Simplex& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool SimplicialComplex::is_subcomplex_of(const SimplicialComplex& other) const {
  for (const auto& [s, i] : index_)
    if (!other.contains(s)) return false;
  return true;
}

SimplicialComplex SimplicialComplex::skeleton(int k) const {
  SimplicialComplex c;
  for (int d = 0; d <= std::min(k, dimension()); ++d) c.by_dim_.push_back(by_dim_[d]);
  for (const auto& layer : c.by_dim_)
    for (std::size_t i = 0; i < layer.size(); ++i) c.index_[layer[i]] = i;
  return c;
}

std::string SimplicialComplex::str() const {
  std::ostringstream os;
  os << "complex(dim " << dimension() << ", f =";
  for (const auto& layer : by_dim_) os << ' ' << layer.size();
  os << ')';
  return os.str();
}

SimplicialComplex complex_union(const SimplicialComplex& a, const SimplicialComplex& b) {
  auto s = a.all_simplices();
  auto t = b.all_simplices();
  s.insert(s.end(), t.begin(), t.end());
  return SimplicialComplex::from_maximal(s);
}

SimplicialComplex complex_intersection(const SimplicialComplex& a, const SimplicialComplex& b) {
  std::vector<Simplex> s;
  for (const auto& x : a.all_simplices())
    if (b.contains(x)) s.push_back(x);
  return SimplicialComplex::from_maximal(s);
}

SimplicialComplex full_simplex(const std::vector<Vertex>& vertices) {
  return SimplicialComplex::from_maximal({vertices});
}

SimplicialComplex simplex_boundary(const std::vector<Vertex>& vertices) {
  Simplex s = canonical(vertices);
  std::vector<Simplex> facets;
  for (std::size_t i = 0; i < s.size(); ++i) facets.push_back(drop(s, i));
  return SimplicialComplex::from_maximal(facets);
}

SimplicialPair::SimplicialPair(SimplicialComplex x, SimplicialComplex z) : X(std::move(x)), Z(std::move(z)) {
  if (!Z.is_subcomplex_of(X)) throw Error(Errc::InvalidPair, "Z is not a subcomplex of X");
}

std::vector<Simplex> SimplicialPair::relative_basis(int dim) const {
  std::vector<Simplex> out;
  for (const auto& s : X.simplices(dim))
    if (!Z.contains(s)) out.push_back(s);
  return out;
}

// ---------------------------------------------------------------------------
// Maps

SimplicialMap::SimplicialMap(SimplicialComplex source, SimplicialComplex target,
                             std::map<Vertex, Vertex> assignment)
    : source_(std::move(source)), target_(std::move(target)), assignment_(std::move(assignment)) {
  for (Vertex v : source_.vertices()) {
    auto it = assignment_.find(v);
    if (it == assignment_.end())
      throw Error(Errc::InvalidInput, "vertex " + std::to_string(v) + " has no image");
    if (!target_.contains({it->second}))
      throw Error(Errc::InvalidInput, "image of vertex " + std::to_string(v) + " is not a vertex");
  }
  for (int d = 1; d <= source_.dimension(); ++d)
    for (const auto& s : source_.simplices(d))
      if (!target_.contains(image(s))) throw Error(Errc::InvalidInput, "vertex map is not simplicial");
}

SimplicialMap SimplicialMap::identity(const SimplicialComplex& x) {
  std::map<Vertex, Vertex> a;
  for (Vertex v : x.vertices()) a[v] = v;
  return SimplicialMap(x, x, std::move(a));
}

SimplicialMap SimplicialMap::inclusion(const SimplicialComplex& sub, const SimplicialComplex& x) {
  std::map<Vertex, Vertex> a;
  for (Vertex v : sub.vertices()) a[v] = v;
  return SimplicialMap(sub, x, std::move(a));
}

Simplex SimplicialMap::image(const Simplex& s) const {
  Simplex t;
  t.reserve(s.size());
  for (Vertex v : s) t.push_back(assignment_.at(v));
  return canonical(std::move(t));
}

std::pair<Simplex, int> SimplicialMap::oriented_image(const Simplex& s) const {
  Simplex t;
  t.reserve(s.size());
  for (Vertex v : s) t.push_back(assignment_.at(v));
  int sign = 1;
  // insertion sort, counting transpositions
  for (std::size_t i = 1; i < t.size(); ++i)
    for (std::size_t j = i; j > 0 && t[j - 1] >= t[j]; --j) {
      if (t[j - 1] == t[j]) return {canonical(t), 0};
      std::swap(t[j - 1], t[j]);
      sign = -sign;
    }
  return {t, sign};
}

SimplicialComplex SimplicialMap::image_complex(const SimplicialComplex& sub) const {
  std::vector<Simplex> out;
  for (const auto& s : sub.all_simplices()) out.push_back(image(s));
  return SimplicialComplex::from_maximal(out);
}

SimplicialMap compose(const SimplicialMap& g, const SimplicialMap& f) {
  if (!f.target().is_subcomplex_of(g.source()))
    throw Error(Errc::DimensionMismatch, "composition of incompatible simplicial maps");
  std::map<Vertex, Vertex> a;
  for (const auto& [v, w] : f.assignment()) a[v] = g(w);
  return SimplicialMap(f.source(), g.target(), std::move(a));
}

// ---------------------------------------------------------------------------
// Chain complexes

ChainComplex::ChainComplex(std::vector<IntMatrix> boundaries, Ring ring)
    : boundaries_(std::move(boundaries)), ring_(ring) {
  for (std::size_t n = 0; n < boundaries_.size(); ++n) {
    ranks_.push_back(boundaries_[n].cols());
    const std::size_t below = n == 0 ? 0 : ranks_[n - 1];
    if (boundaries_[n].rows() != below) throw Error(Errc::DimensionMismatch, "boundary shapes do not chain");
  }
  for (std::size_t n = 2; n < boundaries_.size(); ++n)
    if (!(boundaries_[n - 1] * boundaries_[n]).is_zero())
      throw Error(Errc::InvalidComplex, "boundary squares to a nonzero map in degree " + std::to_string(n));
}

std::size_t ChainComplex::rank(int n) const {
  return n < 0 || n > top_degree() ? 0 : ranks_[n];
}

IntMatrix ChainComplex::boundary(int n) const {
  if (n >= 0 && n <= top_degree()) return boundaries_[n];
  return IntMatrix(rank(n - 1), rank(n));
}

Subquotient ChainComplex::homology(int n) const {
  return subquotient(boundary(n + 1), boundary(n), ring_);
}

std::vector<FgModule> ChainComplex::homology_modules() const {
  std::vector<FgModule> out;
  for (int n = 0; n <= top_degree(); ++n) out.push_back(homology(n).module());
  return out;
}

ChainComplex relative_chain_complex(const SimplicialPair& p, Ring ring) {
  return RelativeHomology(p, ring).chains();
}

RelativeHomology::RelativeHomology(SimplicialPair pair, Ring ring)
    : pair_(std::move(pair)), ring_(ring), empty_(subquotient(IntMatrix(0, 0), IntMatrix(0, 0), ring)) {
  const int top = pair_.X.dimension();
  for (int n = 0; n <= top; ++n) {
    basis_.push_back(pair_.relative_basis(n));
    for (std::size_t i = 0; i < basis_.back().size(); ++i) basis_index_[basis_.back()[i]] = i;
  }
  std::vector<IntMatrix> d;
  for (int n = 0; n <= top; ++n) {
    const std::size_t below = n == 0 ? 0 : basis_[n - 1].size();
    IntMatrix m(below, basis_[n].size());
    if (n > 0)
      for (std::size_t j = 0; j < basis_[n].size(); ++j) {
        const Simplex& s = basis_[n][j];
        for (std::size_t i = 0; i < s.size(); ++i) {
          auto it = basis_index_.find(drop(s, i));
          if (it != basis_index_.end()) m(it->second, j) += face_sign(i);
        }
      }
    d.push_back(std::move(m));
  }
  chains_ = ChainComplex(std::move(d), ring);
  for (int n = 0; n <= top; ++n) degrees_.push_back(chains_.homology(n));
}

const std::vector<Simplex>& RelativeHomology::basis(int n) const {
  return n < 0 || n >= static_cast<int>(basis_.size()) ? no_simplices() : basis_[n];
}

std::optional<std::size_t> RelativeHomology::basis_index(const Simplex& s) const {
  auto it = basis_index_.find(s);
  if (it == basis_index_.end()) return std::nullopt;
  return it->second;
}

const Subquotient& RelativeHomology::degree(int n) const {
  return n < 0 || n >= static_cast<int>(degrees_.size()) ? empty_ : degrees_[n];
}

FgModule RelativeHomology::module(int n) const { return degree(n).module(); }

FgModule relative_homology(const SimplicialPair& p, int n, Ring ring) {
  return RelativeHomology(p, ring).module(n);
}

IntMatrix chain_map(const SimplicialMap& f, const RelativeHomology& src, const RelativeHomology& tgt, int n) {
  const auto& tx = tgt.pair().X;
  for (int d = 0; d <= src.pair().Z.dimension(); ++d)
    for (const auto& s : src.pair().Z.simplices(d))
      if (!tgt.pair().Z.contains(f.image(s))) throw Error(Errc::NotPairMap, "map does not carry Z into Z'");
  const auto& from = src.basis(n);
  IntMatrix m(tgt.basis(n).size(), from.size());
  for (std::size_t j = 0; j < from.size(); ++j) {
    auto [t, sign] = f.oriented_image(from[j]);
    if (sign == 0) continue;
    if (!tx.contains(t)) throw Error(Errc::NotPairMap, "image simplex outside X'");
    if (auto i = tgt.basis_index(t)) m(*i, j) += sign;
  }
  return m;
}

ModuleMap induced_map(const SimplicialMap& f, const RelativeHomology& src, const RelativeHomology& tgt, int n) {
  const IntMatrix c = chain_map(f, src, tgt, n);
  const Subquotient& a = src.degree(n);
  const Subquotient& b = tgt.degree(n);
  IntMatrix m(b.module().generators(), a.module().generators());
  for (std::size_t g = 0; g < a.module().generators(); ++g) {
    IntVector img = c * a.representative(g);
    if (img.empty()) continue;
    m.set_col(g, b.classify(img));
  }
  return ModuleMap(a.module(), b.module(), std::move(m), src.ring());
}

ModuleMap induced_map_on_homology(const SimplicialMap& f, const SimplicialPair& src,
                                  const SimplicialPair& tgt, int n, Ring ring) {
  return induced_map(f, RelativeHomology(src, ring), RelativeHomology(tgt, ring), n);
}

ModuleMap triple_boundary(const RelativeHomology& xz, const RelativeHomology& zw, int n) {
  if (!(xz.pair().Z == zw.pair().X)) throw Error(Errc::NotNested, "triple is not nested");
  const Subquotient& a = xz.degree(n);
  const Subquotient& b = zw.degree(n - 1);
  const auto& cells = xz.basis(n);
  IntMatrix m(b.module().generators(), a.module().generators());
  for (std::size_t g = 0; g < a.module().generators(); ++g) {
    IntVector rep = a.representative(g);
    IntVector out(zw.basis(n - 1).size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (rep[j] == 0) continue;
      const Simplex& s = cells[j];
      for (std::size_t i = 0; i < s.size(); ++i) {
        Simplex f = drop(s, i);
        if (auto k = zw.basis_index(f)) out[*k] += face_sign(i) * rep[j];
      }
    }
    if (n - 1 >= 0 && !out.empty()) m.set_col(g, b.classify(out));
  }
  return ModuleMap(a.module(), b.module(), std::move(m), xz.ring());
}

ModuleMap triple_boundary(const SimplicialComplex& x, const SimplicialComplex& z,
                          const SimplicialComplex& w, int n, Ring ring) {
  if (!z.is_subcomplex_of(x) || !w.is_subcomplex_of(z)) throw Error(Errc::NotNested, "triple is not nested");
  return triple_boundary(RelativeHomology({x, z}, ring), RelativeHomology({z, w}, ring), n);
}

// ---------------------------------------------------------------------------
// Exactness

namespace {

std::size_t free_rank_of(const ModuleMap& f) {
  const auto& s = f.source();
  const auto& t = f.target();
  IntMatrix m = f.matrix().block(t.torsion.size(), s.torsion.size(), t.free_rank, s.free_rank);
  return rank(m);
}

}  // namespace

ExactnessNode exactness_at(const ModuleMap& f, const ModuleMap& g) {
  if (!(f.target() == g.source())) throw Error(Errc::DimensionMismatch, "maps do not compose");
  ExactnessNode node;
  node.composite_zero = compose(g, f).is_zero();
  node.rank_image = free_rank_of(f);
  node.rank_kernel = g.source().free_rank - free_rank_of(g);
  node.exact_q = node.composite_zero && node.rank_image == node.rank_kernel;
  node.exact_z = node.composite_zero && same_lattice(kernel_lift(g), image_lift(f));
  return node;
}

bool LesCertificate::exact() const {
  return std::all_of(nodes.begin(), nodes.end(),
                     [](const ExactnessNode& n) { return n.composite_zero && n.exact_q && n.exact_z; });
}

LesCertificate les_exactness(const SimplicialPair& p) {
  const SimplicialComplex none;
  RelativeHomology z({p.Z, none}, Ring::Z);
  RelativeHomology x({p.X, none}, Ring::Z);
  RelativeHomology xz(p, Ring::Z);
  const auto inc = SimplicialMap::inclusion(p.Z, p.X);
  const auto id = SimplicialMap::identity(p.X);
  const int top = std::max(p.X.dimension(), 0);

  auto i_map = [&](int n) { return induced_map(inc, z, x, n); };
  auto j_map = [&](int n) { return induced_map(id, x, xz, n); };
  auto d_map = [&](int n) {
    if (n <= 0) return ModuleMap::zero(xz.module(n), FgModule{});
    return triple_boundary(xz, z, n);
  };

  LesCertificate cert;
  auto push = [&](ExactnessNode node, const std::string& name, int n) {
    node.module = name;
    node.degree = n;
    cert.nodes.push_back(std::move(node));
  };
  for (int n = top; n >= 0; --n) {
    // h_{n+1}(X,Z) -> h_n(Z) -> h_n(X)
    ModuleMap into_z = n + 1 > top ? ModuleMap::zero(FgModule{}, z.module(n)) : d_map(n + 1);
    push(exactness_at(into_z, i_map(n)), "h_" + std::to_string(n) + "(Z)", n);
    push(exactness_at(i_map(n), j_map(n)), "h_" + std::to_string(n) + "(X)", n);
    push(exactness_at(j_map(n), d_map(n)), "h_" + std::to_string(n) + "(X,Z)", n);
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Products

ProductIndex::ProductIndex(std::vector<Vertex> left, std::vector<Vertex> right)
    : left_(std::move(left)), right_(std::move(right)) {
  std::sort(left_.begin(), left_.end());
  std::sort(right_.begin(), right_.end());
  for (std::size_t i = 0; i < left_.size(); ++i) left_rank_[left_[i]] = i;
  for (std::size_t i = 0; i < right_.size(); ++i) right_rank_[right_[i]] = i;
}

Vertex ProductIndex::id(Vertex x, Vertex y) const {
  auto a = left_rank_.find(x);
  auto b = right_rank_.find(y);
  if (a == left_rank_.end() || b == right_rank_.end())
    throw Error(Errc::InvalidInput, "vertex outside the product factors");
  return static_cast<Vertex>(a->second * right_.size() + b->second);
}

std::pair<Vertex, Vertex> ProductIndex::coords(Vertex v) const {
  const std::size_t n = right_.size();
  if (v < 0 || n == 0 || static_cast<std::size_t>(v) >= left_.size() * n)
    throw Error(Errc::InvalidInput, "not a product vertex");
  return {left_[v / n], right_[v % n]};
}

namespace {

// Calls fn(path) for every lattice path from (0,0) to (p,q); true = step in the first factor.
template <class Fn>
void for_each_path(int p, int q, Fn fn) {
  std::vector<bool> steps(p + q, false);
  // choose positions of the p first-factor steps
  std::vector<int> pos(p);
  for (int i = 0; i < p; ++i) pos[i] = i;
  while (true) {
    std::fill(steps.begin(), steps.end(), false);
    for (int i : pos) steps[i] = true;
    fn(steps);
    int k = p - 1;
    while (k >= 0 && pos[k] == p + q - p + k) --k;
    if (k < 0) break;
    ++pos[k];
    for (int i = k + 1; i < p; ++i) pos[i] = pos[i - 1] + 1;
  }
}

Simplex path_simplex(const Simplex& s, const Simplex& t, const std::vector<bool>& steps, const ProductIndex& index) {
  Simplex out;
  std::size_t a = 0, b = 0;
  out.push_back(index.id(s[0], t[0]));
  for (bool step : steps) {
    if (step) ++a;
    else ++b;
    out.push_back(index.id(s[a], t[b]));
  }
  return out;
}

}  // namespace

std::vector<std::pair<Simplex, int>> shuffle_product(const Simplex& s, const Simplex& t, const ProductIndex& index) {
  const int p = static_cast<int>(s.size()) - 1;
  const int q = static_cast<int>(t.size()) - 1;
  std::vector<std::pair<Simplex, int>> out;
  for_each_path(p, q, [&](const std::vector<bool>& steps) {
    // sign of the (p,q)-shuffle: count (second-factor step, later first-factor step) pairs
    long inversions = 0, seen_second = 0;
    for (bool step : steps) {
      if (step) inversions += seen_second;
      else ++seen_second;
    }
    out.emplace_back(path_simplex(s, t, steps, index), inversions % 2 == 0 ? 1 : -1);
  });
  return out;
}

SimplicialComplex product_complex(const SimplicialComplex& a, const SimplicialComplex& b, const ProductIndex& index) {
  std::vector<Simplex> top;
  const auto ma = maximal_simplices(a);
  const auto mb = maximal_simplices(b);
  for (const auto& s : ma)
    for (const auto& t : mb)
      for (auto& [simplex, sign] : shuffle_product(s, t, index)) top.push_back(std::move(simplex));
  return SimplicialComplex::from_maximal(top);
}

ProductPair product_pair(const SimplicialPair& p1, const SimplicialPair& p2) {
  ProductIndex index(p1.X.vertices(), p2.X.vertices());
  SimplicialComplex x = product_complex(p1.X, p2.X, index);
  SimplicialComplex z = complex_union(product_complex(p1.X, p2.Z, index), product_complex(p1.Z, p2.X, index));
  return ProductPair{SimplicialPair(std::move(x), std::move(z)), std::move(index)};
}

SimplicialMap product_swap(const ProductPair& xy, const ProductPair& yx) {
  if (xy.index.left() != yx.index.right() || xy.index.right() != yx.index.left())
    throw Error(Errc::DimensionMismatch, "swap between mismatched products");
  std::map<Vertex, Vertex> a;
  for (Vertex v : xy.pair.X.vertices()) {
    auto [x, y] = xy.index.coords(v);
    a[v] = yx.index.id(y, x);
  }
  return SimplicialMap(xy.pair.X, yx.pair.X, std::move(a));
}

SimplicialMap product_projection(const ProductPair& xy, const SimplicialComplex& factor, bool left) {
  std::map<Vertex, Vertex> a;
  for (Vertex v : xy.pair.X.vertices()) {
    auto [x, y] = xy.index.coords(v);
    a[v] = left ? x : y;
  }
  return SimplicialMap(xy.pair.X, factor, std::move(a));
}

// ---------------------------------------------------------------------------
// Tensor products of chain complexes

TensorComplex::TensorComplex(const ChainComplex& c, const ChainComplex& d) {
  const int top = c.top_degree() < 0 || d.top_degree() < 0 ? -1 : c.top_degree() + d.top_degree();
  for (int n = 0; n <= d.top_degree(); ++n) right_ranks_.push_back(d.rank(n));
  cells_.resize(std::max(top + 1, 0));
  offsets_.resize(cells_.size());
  for (int n = 0; n <= top; ++n)
    for (int p = 0; p <= n; ++p) {
      const int q = n - p;
      offsets_[n][p] = cells_[n].size();
      for (std::size_t i = 0; i < c.rank(p); ++i)
        for (std::size_t j = 0; j < d.rank(q); ++j) cells_[n].push_back({p, i, j});
    }
  std::vector<IntMatrix> bd;
  for (int n = 0; n <= top; ++n) {
    IntMatrix m(n == 0 ? 0 : cells_[n - 1].size(), cells_[n].size());
    if (n > 0)
      for (std::size_t col = 0; col < cells_[n].size(); ++col) {
        const auto [p, i, j] = cells_[n][col];
        const int q = n - p;
        if (p > 0) {
          const IntMatrix& dc = c.boundary(p);
          for (std::size_t k = 0; k < dc.rows(); ++k)
            if (dc(k, i) != 0) m(index(n - 1, p - 1, k, j), col) += dc(k, i);
        }
        if (q > 0) {
          const IntMatrix dd = d.boundary(q);
          const int sign = p % 2 == 0 ? 1 : -1;
          for (std::size_t l = 0; l < dd.rows(); ++l)
            if (dd(l, j) != 0) m(index(n - 1, p, i, l), col) += sign * dd(l, j);
        }
      }
    bd.push_back(std::move(m));
  }
  complex_ = ChainComplex(std::move(bd), c.ring());
}

const std::vector<TensorComplex::Cell>& TensorComplex::cells(int n) const {
  static const std::vector<Cell> none;
  return n < 0 || n >= static_cast<int>(cells_.size()) ? none : cells_[n];
}

std::size_t TensorComplex::offset(int n, int p) const { return offsets_.at(n).at(p); }

std::size_t TensorComplex::index(int n, int p, std::size_t i, std::size_t j) const {
  const int q = n - p;
  return offset(n, p) + i * right_ranks_.at(q) + j;
}

EzAw ez_aw_maps(const SimplicialPair& p1, const SimplicialPair& p2, Ring ring) {
  ProductPair pp = product_pair(p1, p2);
  RelativeHomology left(p1, ring), right(p2, ring), prod(pp.pair, ring);
  TensorComplex tensor(left.chains(), right.chains());
  EzAw out{left, right, prod, pp.index, tensor, {}, {}};
  const int top = tensor.complex().top_degree();
  for (int n = 0; n <= top; ++n) {
    const auto& cells = tensor.cells(n);
    IntMatrix ez(prod.basis(n).size(), cells.size());
    for (std::size_t col = 0; col < cells.size(); ++col) {
      const auto& cell = cells[col];
      const Simplex& s = left.basis(cell.p)[cell.i];
      const Simplex& t = right.basis(n - cell.p)[cell.j];
      for (const auto& [simplex, sign] : shuffle_product(s, t, pp.index)) {
        auto row = prod.basis_index(simplex);
        if (!row) throw Error(Errc::InvalidComplex, "shuffle simplex lies in the product subcomplex");
        ez(*row, col) += sign;
      }
    }
    IntMatrix aw(cells.size(), prod.basis(n).size());
    for (std::size_t col = 0; col < prod.basis(n).size(); ++col) {
      const Simplex& s = prod.basis(n)[col];
      for (int p = 0; p <= n; ++p) {
        Simplex front, back;
        for (int k = 0; k <= p; ++k) front.push_back(pp.index.coords(s[k]).first);
        for (int k = p; k <= n; ++k) back.push_back(pp.index.coords(s[k]).second);
        if (std::adjacent_find(front.begin(), front.end()) != front.end()) continue;
        if (std::adjacent_find(back.begin(), back.end()) != back.end()) continue;
        auto i = left.basis_index(front);
        auto j = right.basis_index(back);
        if (!i || !j) continue;
        aw(tensor.index(n, p, *i, *j), col) += 1;
      }
    }
    out.ez.push_back(std::move(ez));
    out.aw.push_back(std::move(aw));
  }
  return out;
}

EzAwCertificate check_ez_aw(const EzAw& maps) {
  EzAwCertificate cert;
  const ChainComplex& t = maps.tensor.complex();
  const ChainComplex& c = maps.product.chains();
  const int top = static_cast<int>(maps.ez.size()) - 1;
  cert.max_degree = top;
  for (int n = 1; n <= top; ++n) {
    if (!(c.boundary(n) * maps.ez[n] == maps.ez[n - 1] * t.boundary(n))) cert.ez_chain_map = false;
    if (!(t.boundary(n) * maps.aw[n] == maps.aw[n - 1] * c.boundary(n))) cert.aw_chain_map = false;
  }
  for (int n = 0; n <= top; ++n) {
    if (!(maps.aw[n] * maps.ez[n] == IntMatrix::identity(maps.ez[n].cols()))) cert.aw_ez_identity = false;
    const Subquotient ht = t.homology(n);
    const Subquotient& hc = maps.product.degree(n);
    for (std::size_t g = 0; g < hc.module().generators(); ++g) {
      IntVector cls = ht.classify(maps.aw[n] * hc.representative(g));
      IntVector back = hc.classify(maps.ez[n] * (ht.representatives() * cls));
      IntVector e(hc.module().generators());
      e[g] = 1;
      if (normalize(hc.module(), back) != e) cert.ez_aw_homology_identity = false;
    }
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Cohomology and cup products

RelativeCohomology::RelativeCohomology(SimplicialPair pair, Ring ring)
    : chains_(std::move(pair), ring), empty_(subquotient(IntMatrix(0, 0), IntMatrix(0, 0), ring)) {
  const ChainComplex& c = chains_.chains();
  for (int p = 0; p <= c.top_degree(); ++p)
    degrees_.push_back(subquotient(c.boundary(p).transpose(), c.boundary(p + 1).transpose(), ring));
}

const Subquotient& RelativeCohomology::degree(int p) const {
  return p < 0 || p >= static_cast<int>(degrees_.size()) ? empty_ : degrees_[p];
}

FgModule RelativeCohomology::module(int p) const { return degree(p).module(); }

IntVector cup_cochains(const RelativeHomology& left, const IntVector& alpha, int p,
                       const RelativeHomology& right, const IntVector& beta, int q,
                       const RelativeHomology& target) {
  const auto& cells = target.basis(p + q);
  IntVector out(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const Simplex& s = cells[k];
    Simplex front(s.begin(), s.begin() + p + 1);
    Simplex back(s.begin() + p, s.end());
    auto i = left.basis_index(front);
    auto j = right.basis_index(back);
    if (i && j) out[k] = alpha.at(*i) * beta.at(*j);
  }
  return out;
}

CupProduct relative_cup_product(const SimplicialComplex& x, const SimplicialComplex& z1,
                                const SimplicialComplex& z2, int p, int q, Ring ring) {
  RelativeCohomology a({x, z1}, ring), b({x, z2}, ring);
  SimplicialComplex u = complex_union(z1, z2);
  RelativeCohomology t({x, u}, ring);
  // C(Z1) + C(Z2) has the simplices of Z1 or Z2 as a basis: same relative cochains
  SimplicialPair sum_pair(x, u);
  RelativeCohomology s(sum_pair, ring);

  CupProduct cp;
  cp.p = p;
  cp.q = q;
  cp.left = a.module(p);
  cp.right = b.module(q);
  cp.target = t.module(p + q);
  const std::size_t nl = cp.left.generators(), nr = cp.right.generators();
  cp.table = IntMatrix(cp.target.generators(), nl * nr);
  for (std::size_t i = 0; i < nl; ++i)
    for (std::size_t j = 0; j < nr; ++j) {
      IntVector c = cup_cochains(a.chains(), a.degree(p).representative(i), p, b.chains(),
                                 b.degree(q).representative(j), q, t.chains());
      if (!c.empty()) cp.table.set_col(i * nr + j, t.degree(p + q).classify(c));
    }
  IntMatrix cmp(s.module(p + q).generators(), cp.target.generators());
  for (std::size_t g = 0; g < cp.target.generators(); ++g) {
    IntVector c = t.degree(p + q).representative(g);
    IntVector moved(s.chains().basis(p + q).size());
    for (std::size_t k = 0; k < c.size(); ++k)
      if (auto i = s.chains().basis_index(t.chains().basis(p + q)[k])) moved[*i] = c[k];
    cmp.set_col(g, s.degree(p + q).classify(moved));
  }
  cp.comparison = ModuleMap(cp.target, s.module(p + q), std::move(cmp), ring);
  cp.comparison_iso = cp.comparison.is_isomorphism();
  return cp;
}

// ---------------------------------------------------------------------------
// Cech total complexes

CechComplex cech_total_complex(const SimplicialComplex& x, const std::vector<SimplicialComplex>& cover,
                               const std::vector<SimplicialComplex>& components, Ring ring) {
  if (cover.empty()) throw Error(Errc::NotACover, "empty cover");
  SimplicialComplex u;
  for (const auto& y : cover) {
    if (!y.is_subcomplex_of(x)) throw Error(Errc::NotACover, "cover member is not a subcomplex");
    u = complex_union(u, y);
  }
  if (!(u == x)) throw Error(Errc::NotACover, "cover does not exhaust X");
  for (const auto& z : components)
    if (!z.is_subcomplex_of(x)) throw Error(Errc::InvalidPair, "component is not a subcomplex");
  if (cover.size() > 16 || components.size() > 16) throw Error(Errc::InvalidInput, "too many pieces");

  CechComplex out;
  std::map<std::pair<unsigned, unsigned>, std::size_t> term_of;
  for (unsigned a = 1; a < (1u << cover.size()); ++a)
    for (unsigned b = 0; b < (1u << components.size()); ++b) {
      CechTerm t;
      SimplicialComplex piece;
      bool first = true;
      for (std::size_t k = 0; k < cover.size(); ++k)
        if (a & (1u << k)) {
          t.cover_indices.push_back(k);
          piece = first ? cover[k] : complex_intersection(piece, cover[k]);
          first = false;
        }
      for (std::size_t k = 0; k < components.size(); ++k)
        if (b & (1u << k)) {
          t.component_indices.push_back(k);
          piece = complex_intersection(piece, components[k]);
        }
      t.piece = std::move(piece);
      term_of[{a, b}] = out.terms.size();
      out.terms.push_back(std::move(t));
    }

  auto ij = [&](const CechTerm& t) {
    return static_cast<int>(t.cover_indices.size()) - 1 + static_cast<int>(t.component_indices.size());
  };
  int top = -1;
  for (const auto& t : out.terms)
    if (!t.piece.empty()) top = std::max(top, ij(t) + t.piece.dimension());

  // offsets[n][term] of block C_k(piece), k = n - i - j
  std::vector<std::vector<long>> offsets(std::max(top + 1, 0), std::vector<long>(out.terms.size(), -1));
  std::vector<std::size_t> sizes(offsets.size(), 0);
  for (int n = 0; n <= top; ++n)
    for (std::size_t t = 0; t < out.terms.size(); ++t) {
      const int k = n - ij(out.terms[t]);
      if (k < 0) continue;
      offsets[n][t] = static_cast<long>(sizes[n]);
      sizes[n] += out.terms[t].piece.count(k);
    }

  auto mask_of = [](const std::vector<std::size_t>& idx) {
    unsigned m = 0;
    for (auto i : idx) m |= 1u << i;
    return m;
  };

  std::vector<IntMatrix> bd;
  for (int n = 0; n <= top; ++n) {
    IntMatrix m(n == 0 ? 0 : sizes[n - 1], sizes[n]);
    if (n > 0)
      for (std::size_t t = 0; t < out.terms.size(); ++t) {
        const CechTerm& term = out.terms[t];
        const int i = static_cast<int>(term.cover_indices.size()) - 1;
        const int j = static_cast<int>(term.component_indices.size());
        const int k = n - i - j;
        if (k < 0) continue;
        const unsigned am = mask_of(term.cover_indices), bm = mask_of(term.component_indices);
        const auto& cells = term.piece.simplices(k);
        for (std::size_t c = 0; c < cells.size(); ++c) {
          const std::size_t col = offsets[n][t] + c;
          const Simplex& s = cells[c];
          // Cech direction: drop one cover index
          if (i >= 1)
            for (std::size_t r = 0; r < term.cover_indices.size(); ++r) {
              const std::size_t to = term_of.at({am & ~(1u << term.cover_indices[r]), bm});
              const auto row = out.terms[to].piece.index_of(s);
              m(offsets[n - 1][to] + *row, col) += face_sign(r);
            }
          // component direction: drop one component index
          for (std::size_t r = 0; r < term.component_indices.size(); ++r) {
            const std::size_t to = term_of.at({am, bm & ~(1u << term.component_indices[r])});
            const auto row = out.terms[to].piece.index_of(s);
            m(offsets[n - 1][to] + *row, col) += (i % 2 == 0 ? 1 : -1) * face_sign(r);
          }
          // simplicial boundary
          if (k >= 1) {
            const int sign = (i + j) % 2 == 0 ? 1 : -1;
            for (std::size_t r = 0; r < s.size(); ++r) {
              const auto row = term.piece.index_of(drop(s, r));
              m(offsets[n - 1][t] + *row, col) += sign * face_sign(r);
            }
          }
        }
      }
    bd.push_back(std::move(m));
  }
  out.total = ChainComplex(std::move(bd), ring);
  out.homology = out.total.homology_modules();
  return out;
}

}  // namespace nori
