#include "nori/filtration.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace nori {

// ---------------------------------------------------------------------------
// Filtration

Filtration::Filtration(SimplicialComplex x, std::vector<SimplicialComplex> levels)
    : x_(std::move(x)), levels_(std::move(levels)) {
  if (levels_.empty()) {
    if (!x_.empty()) throw Error(Errc::InvalidFiltration, "no levels for a nonempty space");
    return;
  }
  if (!(levels_.back() == x_)) throw Error(Errc::InvalidFiltration, "last level is not X");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!levels_[i].is_subcomplex_of(x_)) throw Error(Errc::InvalidFiltration, "level is not a subcomplex of X");
    if (levels_[i].dimension() > static_cast<int>(i))
      throw Error(Errc::InvalidFiltration, "level " + std::to_string(i) + " has dimension " +
                                               std::to_string(levels_[i].dimension()));
    if (i > 0 && !levels_[i - 1].is_subcomplex_of(levels_[i]))
      throw Error(Errc::InvalidFiltration, "levels " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                               " are not nested");
  }
}

Filtration Filtration::trivial(const SimplicialComplex& x) {
  std::vector<SimplicialComplex> levels(std::max(x.dimension(), 0));
  if (!x.empty()) levels.push_back(x);
  return Filtration(x, std::move(levels));
}

Filtration Filtration::skeletal(const SimplicialComplex& x) {
  std::vector<SimplicialComplex> levels;
  for (int i = 0; i <= x.dimension(); ++i) levels.push_back(x.skeleton(i));
  return Filtration(x, std::move(levels));
}

const SimplicialComplex& Filtration::level(int i) const {
  if (i < 0) return empty_;
  if (i >= static_cast<int>(levels_.size())) return x_;
  return levels_[i];
}

int Filtration::length() const {
  if (x_.empty()) return -1;
  for (int i = 0; i < static_cast<int>(levels_.size()); ++i)
    if (levels_[i] == x_) return i;
  return static_cast<int>(levels_.size()) - 1;
}

bool Filtration::refined_by(const Filtration& other) const {
  if (!(other.x_ == x_)) return false;
  const int n = std::max(length(), other.length());
  for (int i = 0; i <= n; ++i)
    if (!level(i).is_subcomplex_of(other.level(i))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Very good pairs

VeryGoodReport is_very_good_pair(const SimplicialComplex& x, const SimplicialComplex& z, int n) {
  if (!z.is_subcomplex_of(x)) throw Error(Errc::InvalidPair, "Z is not a subcomplex of X");
  VeryGoodReport r;
  if (x == z) {
    r.equal_low_dimension = x.dimension() < n;
    r.dimension_ok = r.equal_low_dimension;
    r.free = r.concentrated = true;
    r.very_good = r.equal_low_dimension;
    for (int k = 0; k <= x.dimension(); ++k) r.homology.push_back(FgModule{});
    if (!r.very_good) r.reason = "X = Z but dim X >= n";
    return r;
  }
  RelativeHomology h({x, z}, Ring::Z);
  for (int k = 0; k <= x.dimension(); ++k) r.homology.push_back(h.module(k));
  r.dimension_ok = x.dimension() == n && z.dimension() <= n - 1;
  r.free = r.concentrated = true;
  for (int k = 0; k < static_cast<int>(r.homology.size()); ++k) {
    const FgModule& m = r.homology[k];
    bool bad = false;
    if (!m.is_free()) {
      r.free = false;
      bad = true;
    }
    if (k != n && !m.is_zero()) {
      r.concentrated = false;
      bad = true;
    }
    if (bad) r.offending_degrees.push_back(k);
  }
  r.very_good = r.dimension_ok && r.free && r.concentrated;
  if (!r.dimension_ok) r.reason = "dimension bound fails";
  else if (!r.free) r.reason = "torsion in relative homology";
  else if (!r.concentrated) r.reason = "homology outside degree " + std::to_string(n);
  return r;
}

FiltrationReport is_very_good(const Filtration& f) {
  FiltrationReport rep;
  for (int i = 0; i <= f.length(); ++i) {
    rep.levels.push_back(is_very_good_pair(f.level(i), f.level(i - 1), i));
    rep.very_good = rep.very_good && rep.levels.back().very_good;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Cellular complex

bool FiltrationComplex::all_free() const {
  return std::all_of(terms.begin(), terms.end(), [](const FgModule& m) { return m.is_free(); });
}

Subquotient FiltrationComplex::homology_at(int i) const {
  const int n = static_cast<int>(terms.size()) - 1;
  if (i < 0 || i > n) return subquotient(IntMatrix(0, 0), IntMatrix(0, 0), ring);
  ModuleMap in = i + 1 <= n ? differentials[i + 1] : ModuleMap::zero(FgModule{}, terms[i], ring);
  return subquotient(in, differentials[i]);
}

std::vector<FgModule> FiltrationComplex::homology() const {
  std::vector<FgModule> out;
  for (int i = 0; i < static_cast<int>(terms.size()); ++i) out.push_back(homology_at(i).module());
  return out;
}

FiltrationComplex filtration_complex(const Filtration& f, Ring ring, bool require_free) {
  FiltrationComplex c;
  c.ring = ring;
  const int n = f.length();
  for (int i = 0; i <= n; ++i) {
    c.pieces.emplace_back(SimplicialPair(f.level(i), f.level(i - 1)), ring);
    c.terms.push_back(c.pieces.back().module(i));
    if (require_free && !c.terms.back().is_free())
      throw Error(Errc::TorsionTerm, "h_" + std::to_string(i) + "(F_i, F_i-1) = " + c.terms.back().str());
  }
  for (int i = 0; i <= n; ++i) {
    if (i == 0) c.differentials.push_back(ModuleMap::zero(c.terms[0], FgModule{}, ring));
    else c.differentials.push_back(triple_boundary(c.pieces[i], c.pieces[i - 1], i));
  }
  for (int i = 2; i <= n; ++i)
    if (!compose(c.differentials[i - 1], c.differentials[i]).is_zero())
      throw Error(Errc::CompositionNonzero, "filtration differentials do not compose to zero");
  return c;
}

bool FiltrationComparison::all_match() const {
  return std::all_of(match.begin(), match.end(), [](bool b) { return b; });
}

FiltrationComparison compare_filtration_homology(const Filtration& f, Ring ring) {
  FiltrationComparison cmp;
  cmp.very_good = is_very_good(f).very_good;
  auto c = filtration_complex(f, ring);
  cmp.complex_homology = c.homology();
  RelativeHomology h(SimplicialPair::absolute(f.space()), ring);
  const int top = std::max(f.length(), f.space().dimension());
  cmp.complex_homology.resize(std::max<std::size_t>(cmp.complex_homology.size(), top + 1));
  for (int i = 0; i <= top; ++i) {
    cmp.space_homology.push_back(h.module(i));
    cmp.match.push_back(cmp.space_homology[i] == cmp.complex_homology[i]);
  }
  return cmp;
}

// ---------------------------------------------------------------------------
// Functoriality

namespace {

SimplicialMap restrict_map(const SimplicialMap& f, const SimplicialComplex& from, const SimplicialComplex& to) {
  std::map<Vertex, Vertex> a;
  for (Vertex v : from.vertices()) a[v] = f(v);
  return SimplicialMap(from, to, std::move(a));
}

bool same_map(const ModuleMap& a, const ModuleMap& b) {
  return a.source() == b.source() && a.target() == b.target() && a.matrix() == b.matrix();
}

}  // namespace

FiltrationPushforward pushforward_filtration(const SimplicialMap& f, const Filtration& source, Ring ring) {
  if (!(f.source() == source.space())) throw Error(Errc::DimensionMismatch, "map source is not the filtered space");
  const SimplicialComplex& y = f.target();
  const int m = y.dimension();
  const int top = std::max(source.length(), m);
  std::vector<SimplicialComplex> levels;
  for (int i = 0; i <= top; ++i) levels.push_back(i < m ? f.image_complex(source.level(i)) : y);
  FiltrationPushforward out;
  out.target = Filtration(y, std::move(levels));

  auto a = filtration_complex(source, ring);
  auto b = filtration_complex(out.target, ring);
  const int n = static_cast<int>(b.terms.size()) - 1;
  for (int i = 0; i <= n; ++i) {
    if (i < static_cast<int>(a.terms.size())) {
      auto fi = restrict_map(f, source.level(i), out.target.level(i));
      out.maps.push_back(induced_map(fi, a.pieces[i], b.pieces[i], i));
    } else {
      out.maps.push_back(ModuleMap::zero(FgModule{}, b.terms[i], ring));
    }
  }
  const int common = std::min(n, static_cast<int>(a.terms.size()) - 1);
  for (int i = 1; i <= common; ++i)
    if (!same_map(compose(b.differentials[i], out.maps[i]), compose(out.maps[i - 1], a.differentials[i])))
      out.commutes = false;
  return out;
}

ProductFiltration product_filtration(const Filtration& f, const Filtration& g, Ring ring) {
  ProductFiltration out;
  out.index = ProductIndex(f.space().vertices(), g.space().vertices());
  const int a = f.length(), b = g.length();
  std::vector<SimplicialComplex> levels;
  if (a >= 0 && b >= 0)
    for (int i = 0; i <= a + b; ++i) {
      SimplicialComplex h;
      for (int p = std::max(0, i - b); p <= std::min(i, a); ++p)
        h = complex_union(h, product_complex(f.level(p), g.level(i - p), out.index));
      levels.push_back(std::move(h));
    }
  SimplicialComplex whole = levels.empty() ? SimplicialComplex{} : levels.back();
  out.filtration = Filtration(whole, std::move(levels));

  const bool need_free = ring == Ring::Z;
  auto cf = filtration_complex(f, ring, need_free);
  auto cg = filtration_complex(g, ring, need_free);
  out.product_complex = filtration_complex(out.filtration, ring, need_free);
  const auto& ch = out.product_complex;
  const int top = static_cast<int>(ch.terms.size()) - 1;

  // tensor basis offsets
  auto ngen = [](const FiltrationComplex& c, int i) -> std::size_t {
    return i >= 0 && i < static_cast<int>(c.terms.size()) ? c.terms[i].generators() : 0;
  };
  std::vector<std::map<int, std::size_t>> offset(top + 1);
  std::vector<std::size_t> size(top + 1, 0);
  for (int n = 0; n <= top; ++n)
    for (int p = 0; p <= n; ++p) {
      offset[n][p] = size[n];
      size[n] += ngen(cf, p) * ngen(cg, n - p);
    }

  for (int n = 0; n <= top; ++n) {
    const RelativeHomology& target = ch.pieces[n];
    IntMatrix k(ch.terms[n].generators(), size[n]);
    for (int p = 0; p <= n; ++p) {
      const int q = n - p;
      for (std::size_t x = 0; x < ngen(cf, p); ++x)
        for (std::size_t y = 0; y < ngen(cg, q); ++y) {
          IntVector alpha = cf.pieces[p].degree(p).representative(x);
          IntVector beta = cg.pieces[q].degree(q).representative(y);
          IntVector chain(target.basis(n).size());
          for (std::size_t s = 0; s < alpha.size(); ++s) {
            if (alpha[s] == 0) continue;
            for (std::size_t t = 0; t < beta.size(); ++t) {
              if (beta[t] == 0) continue;
              for (const auto& [simplex, sign] :
                   shuffle_product(cf.pieces[p].basis(p)[s], cg.pieces[q].basis(q)[t], out.index))
                if (auto row = target.basis_index(simplex)) chain[*row] += sign * alpha[s] * beta[t];
            }
          }
          if (!chain.empty())
            k.set_col(offset[n][p] + x * ngen(cg, q) + y, target.degree(n).classify(chain));
        }
    }
    out.kunneth.push_back(std::move(k));

    IntMatrix d(n == 0 ? 0 : size[n - 1], size[n]);
    if (n > 0)
      for (int p = 0; p <= n; ++p) {
        const int q = n - p;
        for (std::size_t x = 0; x < ngen(cf, p); ++x)
          for (std::size_t y = 0; y < ngen(cg, q); ++y) {
            const std::size_t col = offset[n][p] + x * ngen(cg, q) + y;
            if (p > 0) {
              const IntMatrix& df = cf.differentials[p].matrix();
              for (std::size_t r = 0; r < df.rows(); ++r)
                if (df(r, x) != 0) d(offset[n - 1][p - 1] + r * ngen(cg, q) + y, col) += df(r, x);
            }
            if (q > 0) {
              const IntMatrix& dg = cg.differentials[q].matrix();
              for (std::size_t r = 0; r < dg.rows(); ++r)
                if (dg(r, y) != 0)
                  d(offset[n - 1][p] + x * ngen(cg, q - 1) + r, col) += (p % 2 == 0 ? 1 : -1) * dg(r, y);
            }
          }
      }
    out.tensor_differentials.push_back(std::move(d));
  }
  for (int n = 1; n <= top; ++n) {
    IntMatrix lhs = ch.differentials[n].matrix() * out.kunneth[n];
    IntMatrix rhs = out.kunneth[n - 1] * out.tensor_differentials[n];
    lhs = ModuleMap(FgModule::free(lhs.cols()), ch.terms[n - 1], lhs, ring).matrix();
    rhs = ModuleMap(FgModule::free(rhs.cols()), ch.terms[n - 1], rhs, ring).matrix();
    if (!(lhs == rhs)) out.chain_map = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Very good refinement

namespace {

constexpr std::size_t batch_size = 64;

struct LevelSearch {
  LevelSearch(const SimplicialComplex& t, const SimplicialComplex& b, int k, std::size_t budget)
      : top(t), base(b), n(k), budget_left(budget) {}

  const SimplicialComplex& top;
  const SimplicialComplex& base;
  int n;
  std::size_t budget_left;
  std::size_t tested = 0;
  std::optional<SimplicialComplex> found;

  std::vector<Simplex> pool;
  std::vector<Simplex> chosen;
  std::set<Simplex> present;
  std::vector<std::vector<Simplex>> batch;
  bool stop = false;
  bool out_of_budget = false;

  bool facets_present(const Simplex& s) const {
    if (s.size() == 1) return true;
    for (std::size_t i = 0; i < s.size(); ++i) {
      Simplex f = s;
      f.erase(f.begin() + i);
      if (!present.count(f)) return false;
    }
    return true;
  }

  SimplicialComplex build(const std::vector<Simplex>& extra) const {
    auto all = base.all_simplices();
    all.insert(all.end(), extra.begin(), extra.end());
    return SimplicialComplex::from_maximal(all);
  }

  void flush() {
    if (batch.empty() || stop) return;
    std::size_t count = batch.size();
    if (count > budget_left - tested) count = budget_left - tested;
    std::vector<char> good(count, 0);
    const long m = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < m; ++i) good[i] = is_very_good_pair(top, build(batch[i]), n).very_good ? 1 : 0;
    for (std::size_t i = 0; i < count; ++i)
      if (good[i]) {
        tested += i + 1;
        found = build(batch[i]);
        stop = true;
        batch.clear();
        return;
      }
    tested += count;
    if (count < batch.size()) {
      out_of_budget = true;
      stop = true;
    }
    batch.clear();
  }

  void emit() {
    batch.push_back(chosen);
    if (batch.size() == batch_size) flush();
  }

  void choose(std::size_t start, std::size_t need) {
    if (stop) return;
    if (need == 0) {
      emit();
      return;
    }
    for (std::size_t i = start; i + need <= pool.size() && !stop; ++i) {
      if (!facets_present(pool[i])) continue;
      chosen.push_back(pool[i]);
      present.insert(pool[i]);
      choose(i + 1, need - 1);
      present.erase(pool[i]);
      chosen.pop_back();
    }
  }

  void run() {
    for (int d = 0; d <= n - 1; ++d)
      for (const auto& s : top.simplices(d))
        if (!base.contains(s)) pool.push_back(s);
    for (const auto& s : base.all_simplices()) present.insert(s);
    for (std::size_t m = 0; m <= pool.size() && !stop; ++m) {
      choose(0, m);
      flush();
    }
  }
};

}  // namespace

RefinementResult find_very_good_refinement(const Filtration& f, std::size_t budget) {
  RefinementResult res;
  const int n = f.length();
  if (n <= 0) {
    res.filtration = f;
    res.report = "length " + std::to_string(n) + ": already very good";
    return res;
  }
  std::vector<SimplicialComplex> g(n + 1);
  g[n] = f.space();
  for (int k = n; k >= 1; --k) {
    const SimplicialComplex& top = g[k];
    if (top.dimension() < k) {
      g[k - 1] = top;
      continue;
    }
    LevelSearch search(top, f.level(k - 1), k, budget - res.candidates_tested);
    search.run();
    res.candidates_tested += search.tested;
    if (search.out_of_budget)
      throw Error(Errc::BudgetExceeded, "budget of " + std::to_string(budget) + " candidates exhausted at level " +
                                            std::to_string(k - 1));
    if (!search.found) {
      res.report = "no very good Z at level " + std::to_string(k - 1) + " after " +
                   std::to_string(search.tested) + " candidates";
      return res;
    }
    g[k - 1] = *search.found;
  }
  res.filtration = Filtration(f.space(), std::move(g));
  res.report = "found after " + std::to_string(res.candidates_tested) + " candidates";
  return res;
}

}  // namespace nori
