#pragma once

#include <cstddef>
#include <string>

namespace finin::kernels {

// Inner-loop primitives behind all tensor math. Each backend provides the
// same table; the dispatcher picks one at startup. Backends may differ in
// floating-point summation order, so cross-backend results agree to rounding,
// not bitwise; a fixed backend is bitwise deterministic.
struct Ops {
  const char* name;
  double (*dot)(const double* a, const double* b, size_t n);
  void (*axpy)(double alpha, const double* x, double* y, size_t n);  // y += alpha*x
  void (*scale)(double alpha, double* x, size_t n);                  // x *= alpha
  void (*add)(const double* x, double* y, size_t n);                 // y += x
  void (*relu)(const double* x, double* y, size_t n);                // y = max(x, 0)
  void (*relu_grad)(const double* x, const double* dy, double* dx, size_t n);  // dx += dy * (x>0)
};

const Ops& scalar_ops();

bool avx2_available();       // CPU supports AVX2 (always false off x86-64)
const Ops& avx2_ops();       // valid only when avx2_available()

// Active backend. Chosen once: FININ_KERNELS=scalar|avx2 wins, otherwise
// AVX2 when the CPU has it, else scalar.
const Ops& active();

// Dense helpers on top of the active backend. Row-major.
// C (+)= A[m×k] · B[k×n]
void matmul(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
            bool accumulate);
// C (+)= A[m×k] · B[n×k]^T
void matmul_nt(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool accumulate);
// C[k×n] += A[m×k]^T · B[m×n]   (gradient of weights: dW += X^T · dY)
void matmul_tn_acc(const double* a, const double* b, double* c, size_t m, size_t k, size_t n);

}  // namespace finin::kernels
