#include "nori/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nori::kernels {

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<SmithForm> smith_batch_serial(std::span<const IntMatrix> batch) {
  std::vector<SmithForm> out;
  out.reserve(batch.size());
  for (const auto& m : batch) out.push_back(smith_normal_form(m));
  return out;
}

std::vector<SmithForm> smith_batch_parallel(std::span<const IntMatrix> batch) {
  std::vector<SmithForm> out(batch.size());
  const long n = static_cast<long>(batch.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) out[i] = smith_normal_form(batch[i]);
  return out;
}

}  // namespace nori::kernels
