#include "psum/kernels.hpp"

#include <cstddef>
#include <cstdint>

#include "psum/error.hpp"

namespace psum::kernels {
namespace {

void check_affine(const Matrix& a, std::span<const double> x, std::span<const double> bias,
                  std::span<double> out) {
  if (x.size() > a.cols || bias.size() != a.rows || out.size() != a.rows)
    throw ContractError("affine: shape mismatch");
}

void check_transposed(const Matrix& a, std::span<const double> v, std::span<double> out) {
  if (v.size() != a.rows || out.size() != a.cols)
    throw ContractError("transposed_product: shape mismatch");
}

void check_outer(const Matrix& a, std::span<const double> u, std::span<const double> v) {
  if (u.size() != a.rows || v.size() > a.cols) throw ContractError("add_outer: shape mismatch");
}

// Four interleaved partial sums, combined pairwise. Both variants call this,
// so the summation order is fixed.
inline double dot(const double* a, const double* x, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    s0 += a[j] * x[j];
    s1 += a[j + 1] * x[j + 1];
    s2 += a[j + 2] * x[j + 2];
    s3 += a[j + 3] * x[j + 3];
  }
  for (; j < n; ++j) s0 += a[j] * x[j];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

namespace serial {

void affine(const Matrix& a, std::span<const double> x, std::span<const double> bias,
            std::span<double> out) {
  check_affine(a, x, bias, out);
  for (std::size_t i = 0; i < a.rows; ++i) {
    out[i] = dot(a.values.data() + i * a.cols, x.data(), x.size()) + bias[i];
  }
}

void transposed_product(const Matrix& a, std::span<const double> v, std::span<double> out) {
  check_transposed(a, v, out);
  for (std::size_t j = 0; j < a.cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) s += a(i, j) * v[i];
    out[j] = s;
  }
}

void add_outer(Matrix& a, double alpha, std::span<const double> u, std::span<const double> v) {
  check_outer(a, u, v);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double scale = alpha * u[i];
    double* row = a.values.data() + i * a.cols;
    for (std::size_t j = 0; j < v.size(); ++j) row[j] += scale * v[j];
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw ContractError("axpy: shape mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void axpy_outer(Matrix& a, double alpha, std::span<const double> u, std::span<const double> v) {
  check_outer(a, u, v);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double ui = u[i];
    double* row = a.values.data() + i * a.cols;
    for (std::size_t j = 0; j < v.size(); ++j) row[j] += alpha * (ui * v[j]);
  }
}

}  // namespace serial

namespace parallel {

void affine(const Matrix& a, std::span<const double> x, std::span<const double> bias,
            std::span<double> out) {
  check_affine(a, x, bias, out);
  const auto rows = static_cast<std::int64_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    out[i] = dot(a.values.data() + i * a.cols, x.data(), x.size()) + bias[i];
  }
}

void transposed_product(const Matrix& a, std::span<const double> v, std::span<double> out) {
  check_transposed(a, v, out);
  const auto cols = static_cast<std::int64_t>(a.cols);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) s += a(i, j) * v[i];
    out[j] = s;
  }
}

void add_outer(Matrix& a, double alpha, std::span<const double> u, std::span<const double> v) {
  check_outer(a, u, v);
  const auto rows = static_cast<std::int64_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    const double scale = alpha * u[i];
    double* row = a.values.data() + i * a.cols;
    for (std::size_t j = 0; j < v.size(); ++j) row[j] += scale * v[j];
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw ContractError("axpy: shape mismatch");
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_outer(Matrix& a, double alpha, std::span<const double> u, std::span<const double> v) {
  check_outer(a, u, v);
  const auto rows = static_cast<std::int64_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    const double ui = u[i];
    double* row = a.values.data() + i * a.cols;
    for (std::size_t j = 0; j < v.size(); ++j) row[j] += alpha * (ui * v[j]);
  }
}

}  // namespace parallel
}  // namespace psum::kernels
