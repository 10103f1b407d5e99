// Serial reference vs OpenMP kernels on random exact matrices.
//
//   bench_kernels [--quick] [--reps n]
//
// Every parallel result is compared against the serial one; a mismatch
// exits 1.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "nori/kernels.hpp"

using namespace nori;

namespace {

IntMatrix random_int(std::mt19937_64& rng, std::size_t r, std::size_t c, long lo, long hi) {
  std::uniform_int_distribution<long> d(lo, hi);
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

RatMatrix random_rat(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::uniform_int_distribution<long> num(-20, 20), den(1, 7);
  RatMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      m(i, j) = mpq_class(num(rng), den(rng));
      m(i, j).canonicalize();
    }
  return m;
}

// best of `reps`, in milliseconds
double best_ms(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

bool same(const std::vector<SmithForm>& a, const std::vector<SmithForm>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].diagonal != b[i].diagonal || a[i].rank != b[i].rank) return false;
  return true;
}

int failures = 0;

void row(const char* name, const char* size, double s, double p, bool ok) {
  std::printf("%-14s %-12s %10.2f %10.2f %8.2fx  %s\n", name, size, s, p, s / p, ok ? "ok" : "MISMATCH");
  if (!ok) ++failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernels"};
  bool quick = false;
  int reps = 3;
  app.add_flag("--quick", quick, "small sizes, one repetition");
  app.add_option("--reps", reps, "repetitions per kernel (best is reported)");
  CLI11_PARSE(app, argc, argv);
  if (quick) reps = 1;

  std::printf("openmp %s, %d threads\n", kernels::openmp_enabled() ? "on" : "off", kernels::max_threads());
  std::printf("%-14s %-12s %10s %10s %9s\n", "kernel", "size", "serial ms", "omp ms", "speedup");
  std::mt19937_64 rng(20240611);

  for (std::size_t n : quick ? std::vector<std::size_t>{24} : std::vector<std::size_t>{40, 80, 120}) {
    IntMatrix a = random_int(rng, n, n, -9, 9), b = random_int(rng, n, n, -9, 9);
    IntMatrix cs, cp;
    double s = best_ms(reps, [&] { cs = kernels::serial::multiply(a, b); });
    double p = best_ms(reps, [&] { cp = kernels::parallel::multiply(a, b); });
    row("multiply Z", (std::to_string(n) + "^2").c_str(), s, p, cs == cp);

    RatMatrix x = random_rat(rng, n, n), y = random_rat(rng, n, n);
    RatMatrix qs, qp;
    s = best_ms(reps, [&] { qs = kernels::serial::multiply(x, y); });
    p = best_ms(reps, [&] { qp = kernels::parallel::multiply(x, y); });
    row("multiply Q", (std::to_string(n) + "^2").c_str(), s, p, qs == qp);

    // one elimination step against every other row
    std::vector<std::size_t> targets(n - 1);
    std::iota(targets.begin(), targets.end(), 1);
    std::vector<mpq_class> factors;
    for (std::size_t i = 1; i < n; ++i) factors.push_back(x(i, 0) / (x(0, 0) == 0 ? mpq_class(1) : x(0, 0)));
    RatMatrix ms, mp;
    s = best_ms(reps, [&] {
      ms = x;
      for (int k = 0; k < 8; ++k) kernels::serial::row_axpy<mpq_class>(ms, 0, targets, factors);
    });
    p = best_ms(reps, [&] {
      mp = x;
      for (int k = 0; k < 8; ++k) kernels::parallel::row_axpy<mpq_class>(mp, 0, targets, factors);
    });
    row("row_axpy x8", (std::to_string(n) + "^2").c_str(), s, p, ms == mp);
  }

  const std::size_t count = quick ? 200 : 2000;
  std::vector<IntMatrix> batch;
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  for (std::size_t i = 0; i < count; ++i) batch.push_back(random_int(rng, dim(rng), dim(rng), -9, 9));
  std::vector<SmithForm> ss, sp;
  double s = best_ms(reps, [&] { ss = kernels::smith_batch_serial(batch); });
  double p = best_ms(reps, [&] { sp = kernels::smith_batch_parallel(batch); });
  row("smith batch", (std::to_string(count) + " x <=6").c_str(), s, p, same(ss, sp));

  return failures == 0 ? 0 : 1;
}
