#pragma once

#include <span>

#include "psum/matrix.hpp"

// Dense kernels used by the network. Each kernel exists in two variants:
//
//   serial::   straightforward loops, the reference the tests compare against
//   parallel:: OpenMP over output rows/columns
//
// Both variants evaluate every output element with the same operation order,
// so their results are bitwise identical for any thread count.
//
// Vector arguments may be shorter than the matching matrix dimension where
// noted; the missing tail is taken to be zero.
namespace psum::kernels {

enum class Exec { serial, parallel };

namespace serial {

/// out = a * x + bias. x may be shorter than a.cols.
void affine(const Matrix& a, std::span<const double> x, std::span<const double> bias,
            std::span<double> out);

/// out = a^T * v
void transposed_product(const Matrix& a, std::span<const double> v, std::span<double> out);

/// a += alpha * u v^T. v may be shorter than a.cols; later columns are
/// left untouched.
void add_outer(Matrix& a, double alpha, std::span<const double> u, std::span<const double> v);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// a += alpha * (u v^T), rounding each product u_i v_j before scaling, which
/// matches add_outer into zeros followed by axpy. v may be shorter than
/// a.cols.
void axpy_outer(Matrix& a, double alpha, std::span<const double> u, std::span<const double> v);

}  // namespace serial

namespace parallel {

void affine(const Matrix& a, std::span<const double> x, std::span<const double> bias,
            std::span<double> out);
void transposed_product(const Matrix& a, std::span<const double> v, std::span<double> out);
void add_outer(Matrix& a, double alpha, std::span<const double> u, std::span<const double> v);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void axpy_outer(Matrix& a, double alpha, std::span<const double> u, std::span<const double> v);

}  // namespace parallel

inline void affine(Exec exec, const Matrix& a, std::span<const double> x,
                   std::span<const double> bias, std::span<double> out) {
  exec == Exec::parallel ? parallel::affine(a, x, bias, out) : serial::affine(a, x, bias, out);
}

inline void transposed_product(Exec exec, const Matrix& a, std::span<const double> v,
                               std::span<double> out) {
  exec == Exec::parallel ? parallel::transposed_product(a, v, out)
                         : serial::transposed_product(a, v, out);
}

inline void add_outer(Exec exec, Matrix& a, double alpha, std::span<const double> u,
                      std::span<const double> v) {
  exec == Exec::parallel ? parallel::add_outer(a, alpha, u, v) : serial::add_outer(a, alpha, u, v);
}

inline void axpy(Exec exec, double alpha, std::span<const double> x, std::span<double> y) {
  exec == Exec::parallel ? parallel::axpy(alpha, x, y) : serial::axpy(alpha, x, y);
}

inline void axpy_outer(Exec exec, Matrix& a, double alpha, std::span<const double> u,
                       std::span<const double> v) {
  exec == Exec::parallel ? parallel::axpy_outer(a, alpha, u, v)
                         : serial::axpy_outer(a, alpha, u, v);
}

}  // namespace psum::kernels
