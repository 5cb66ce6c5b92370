#include "finin/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace finin::kernels {

namespace {

const Ops& pick_backend() {
  const char* env = std::getenv("FININ_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return scalar_ops();
    if (std::strcmp(env, "avx2") == 0 && avx2_available()) return avx2_ops();
  }
  return avx2_available() ? avx2_ops() : scalar_ops();
}

}  // namespace

const Ops& active() {
  static const Ops& ops = pick_backend();
  return ops;
}

void matmul(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
            bool accumulate) {
  const Ops& ops = active();
  if (!accumulate) std::memset(c, 0, m * n * sizeof(double));
  for (size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (size_t p = 0; p < k; ++p) {
      const double aip = arow[p];
      if (aip != 0.0) ops.axpy(aip, b + p * n, crow, n);
    }
  }
}

void matmul_nt(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool accumulate) {
  const Ops& ops = active();
  for (size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (size_t j = 0; j < n; ++j) {
      const double d = ops.dot(arow, b + j * k, k);
      crow[j] = accumulate ? crow[j] + d : d;
    }
  }
}

void matmul_tn_acc(const double* a, const double* b, double* c, size_t m, size_t k, size_t n) {
  const Ops& ops = active();
  for (size_t r = 0; r < m; ++r) {
    const double* arow = a + r * k;
    const double* brow = b + r * n;
    for (size_t i = 0; i < k; ++i) {
      const double ari = arow[i];
      if (ari != 0.0) ops.axpy(ari, brow, c + i * n, n);
    }
  }
}

}  // namespace finin::kernels
