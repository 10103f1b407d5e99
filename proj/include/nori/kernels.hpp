#pragma once

// Data-parallel inner loops of the exact linear algebra.
//
// Each kernel has a serial reference (namespace serial) and an OpenMP
// version (namespace parallel).  Both produce bit-identical results: every
// output row or column is written by exactly one iteration and the
// arithmetic is exact, so scheduling cannot change the answer.  The
// dispatchers at the bottom pick the OpenMP path above a work threshold.

#include <cstddef>
#include <span>
#include <vector>

#include "nori/linalg.hpp"

namespace nori::kernels {

/// Below this many scalar operations the OpenMP fork/join costs more than it saves.
inline constexpr std::size_t parallel_threshold = 1u << 14;

bool openmp_enabled();
int max_threads();

namespace serial {

/// m.row(targets[k]) -= factors[k] * m.row(pivot), for every k.
template <class T>
void row_axpy(Matrix<T>& m, std::size_t pivot, std::span<const std::size_t> targets,
              std::span<const T> factors) {
  const std::size_t n = m.cols();
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (factors[k] == 0) continue;
    auto dst = m.row(targets[k]);
    auto src = m.row(pivot);
    for (std::size_t j = 0; j < n; ++j)
      if (src[j] != 0) dst[j] -= factors[k] * src[j];
  }
}

/// m.col(targets[k]) -= factors[k] * m.col(pivot), for every k.
template <class T>
void col_axpy(Matrix<T>& m, std::size_t pivot, std::span<const std::size_t> targets,
              std::span<const T> factors) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const T& p = m(i, pivot);
    if (p == 0) continue;
    for (std::size_t k = 0; k < targets.size(); ++k)
      if (factors[k] != 0) m(i, targets[k]) -= factors[k] * p;
  }
}

template <class T>
Matrix<T> multiply(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const T& x = a(i, l);
      if (x == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        if (b(l, j) != 0) c(i, j) += x * b(l, j);
    }
  return c;
}

}  // namespace serial

namespace parallel {

template <class T>
void row_axpy(Matrix<T>& m, std::size_t pivot, std::span<const std::size_t> targets,
              std::span<const T> factors) {
  const std::size_t n = m.cols();
  const long count = static_cast<long>(targets.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long k = 0; k < count; ++k) {
    if (factors[k] == 0) continue;
    auto dst = m.row(targets[k]);
    auto src = m.row(pivot);
    for (std::size_t j = 0; j < n; ++j)
      if (src[j] != 0) dst[j] -= factors[k] * src[j];
  }
}

template <class T>
void col_axpy(Matrix<T>& m, std::size_t pivot, std::span<const std::size_t> targets,
              std::span<const T> factors) {
  const long rows = static_cast<long>(m.rows());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < rows; ++i) {
    const T& p = m(i, pivot);
    if (p == 0) continue;
    for (std::size_t k = 0; k < targets.size(); ++k)
      if (factors[k] != 0) m(i, targets[k]) -= factors[k] * p;
  }
}

template <class T>
Matrix<T> multiply(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> c(a.rows(), b.cols());
  const long rows = static_cast<long>(a.rows());
#pragma omp parallel for schedule(dynamic, 2)
  for (long i = 0; i < rows; ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const T& x = a(i, l);
      if (x == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        if (b(l, j) != 0) c(i, j) += x * b(l, j);
    }
  return c;
}

}  // namespace parallel

template <class T>
void row_axpy(Matrix<T>& m, std::size_t pivot, std::span<const std::size_t> targets,
              std::span<const T> factors) {
  if (targets.size() * m.cols() >= parallel_threshold)
    parallel::row_axpy(m, pivot, targets, factors);
  else
    serial::row_axpy(m, pivot, targets, factors);
}

template <class T>
void col_axpy(Matrix<T>& m, std::size_t pivot, std::span<const std::size_t> targets,
              std::span<const T> factors) {
  if (targets.size() * m.rows() >= parallel_threshold)
    parallel::col_axpy(m, pivot, targets, factors);
  else
    serial::col_axpy(m, pivot, targets, factors);
}

template <class T>
Matrix<T> multiply(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() * a.cols() * b.cols() >= parallel_threshold)
    return parallel::multiply(a, b);
  return serial::multiply(a, b);
}

/// Smith normal forms of a batch, one matrix per iteration.
std::vector<SmithForm> smith_batch_serial(std::span<const IntMatrix> batch);
std::vector<SmithForm> smith_batch_parallel(std::span<const IntMatrix> batch);

}  // namespace nori::kernels
