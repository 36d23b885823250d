#pragma once

// Hot stencil kernels for the stabilized operator and the leapfrog updates.
//
// Every kernel exists twice: `serial::` is a plain composition of
// one-directional difference passes and serves as the reference, `omp::` is
// the fused OpenMP version used by the solvers. Both evaluate differences with
// zero extension outside the grid, so that
//
//   A   = curlB (mu^-1 curlF E) - s gradF divB (eps E)
//   A^T = curlB (mu^-1 curlF a) - s eps gradF divB a
//
// are exact transposes of each other on the full node set.

#include <array>
#include <span>

#include "emrecon/domain.hpp"
#include "emrecon/fields.hpp"

namespace emrecon::kernels {

/// Where eps enters the divergence penalty.
enum class Penalty {
  EpsInsideDivergence,  // forward: -s grad(div(eps E))
  EpsOutsideGradient,   // adjoint: -s eps grad(div a)
};

struct OperatorWorkspace {
  std::array<NodalArray, 3> y;  // mu^-1 curlF
  NodalArray q;                 // divB
  VectorFrame a;                // scaled adjoint input / operator output

  void resize(std::size_t n);
};

struct Coefficients {
  std::span<const double> eps;
  std::span<const double> mu;
  double s = 1.0;
};

namespace serial {

void forward_difference(const Grid3& g, std::span<const double> u, int axis, std::span<double> out);
void backward_difference(const Grid3& g, std::span<const double> u, int axis, std::span<double> out);

void apply_operator(const Grid3& g, const VectorFrame& e, const Coefficients& c, Penalty p,
                    VectorFrame& out);

/// next = 2 curr - prev - tau^2/eps * A(curr) on interior nodes only.
void leapfrog_interior(const Grid3& g, const VectorFrame& prev, const VectorFrame& curr,
                       const Coefficients& c, double tau, VectorFrame& next);

/// Transpose of leapfrog_interior. `u_next` holds the multipliers of the
/// interior update (boundary entries ignored). Accumulates
///   u_curr += 2 u_next|_I - tau^2 A^T(u_next|_I / eps),   u_prev|_I -= u_next|_I.
void reverse_leapfrog_interior(const Grid3& g, const VectorFrame& u_next, const Coefficients& c,
                               double tau, VectorFrame& u_curr, VectorFrame& u_prev);

}  // namespace serial

namespace omp {

void apply_operator(const Grid3& g, const VectorFrame& e, const Coefficients& c, Penalty p,
                    OperatorWorkspace& ws, VectorFrame& out);

void leapfrog_interior(const Grid3& g, const VectorFrame& prev, const VectorFrame& curr,
                       const Coefficients& c, double tau, OperatorWorkspace& ws,
                       VectorFrame& next);

void reverse_leapfrog_interior(const Grid3& g, const VectorFrame& u_next, const Coefficients& c,
                               double tau, OperatorWorkspace& ws, VectorFrame& u_curr,
                               VectorFrame& u_prev);

}  // namespace omp

/// Number of OpenMP threads the omp kernels will use (1 without OpenMP).
int thread_count();

}  // namespace emrecon::kernels
