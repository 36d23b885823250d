// Reference kernels: every operator is an explicit composition of single-axis
// difference passes. Kept simple on purpose; the tests compare the OpenMP
// kernels against these.

#include <vector>

#include "emrecon/kernels.hpp"

namespace emrecon::kernels {

void OperatorWorkspace::resize(std::size_t n) {
  for (auto& c : y) c.assign(n, 0.0);
  q.assign(n, 0.0);
  a = VectorFrame(n);
}

namespace serial {

void forward_difference(const Grid3& g, std::span<const double> u, int axis, std::span<double> out) {
  const double h = g.spacing();
  const std::ptrdiff_t s = g.stride(axis);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Index3 ijk = g.unravel(p);
    const double up = ijk[axis] + 1 < g.count(axis) ? u[p + s] : 0.0;
    out[p] = (up - u[p]) / h;
  }
}

void backward_difference(const Grid3& g, std::span<const double> u, int axis, std::span<double> out) {
  const double h = g.spacing();
  const std::ptrdiff_t s = g.stride(axis);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Index3 ijk = g.unravel(p);
    const double um = ijk[axis] > 0 ? u[p - s] : 0.0;
    out[p] = (u[p] - um) / h;
  }
}

namespace {

using Array = std::vector<double>;

Array fwd(const Grid3& g, const Array& u, int axis) {
  Array out(g.size());
  forward_difference(g, u, axis, out);
  return out;
}

Array bwd(const Grid3& g, const Array& u, int axis) {
  Array out(g.size());
  backward_difference(g, u, axis, out);
  return out;
}

bool interior(const Grid3& g, std::size_t p) { return !g.on_boundary(g.unravel(p)); }

}  // namespace

void apply_operator(const Grid3& g, const VectorFrame& e, const Coefficients& c, Penalty pen,
                    VectorFrame& out) {
  const std::size_t n = g.size();

  // y = mu^-1 curlF(E)
  std::array<Array, 3> y;
  {
    const Array d1e2 = fwd(g, e.comp[2], 1), d2e1 = fwd(g, e.comp[1], 2);
    const Array d2e0 = fwd(g, e.comp[0], 2), d0e2 = fwd(g, e.comp[2], 0);
    const Array d0e1 = fwd(g, e.comp[1], 0), d1e0 = fwd(g, e.comp[0], 1);
    for (auto& v : y) v.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      y[0][p] = (d1e2[p] - d2e1[p]) / c.mu[p];
      y[1][p] = (d2e0[p] - d0e2[p]) / c.mu[p];
      y[2][p] = (d0e1[p] - d1e0[p]) / c.mu[p];
    }
  }

  // q = divB(eps E) or divB(E)
  Array q(n);
  {
    std::array<Array, 3> w;
    for (int a = 0; a < 3; ++a) {
      w[a].resize(n);
      for (std::size_t p = 0; p < n; ++p)
        w[a][p] = pen == Penalty::EpsInsideDivergence ? c.eps[p] * e.comp[a][p] : e.comp[a][p];
    }
    const Array b0 = bwd(g, w[0], 0), b1 = bwd(g, w[1], 1), b2 = bwd(g, w[2], 2);
    for (std::size_t p = 0; p < n; ++p) q[p] = b0[p] + b1[p] + b2[p];
  }

  const Array b1y2 = bwd(g, y[2], 1), b2y1 = bwd(g, y[1], 2);
  const Array b2y0 = bwd(g, y[0], 2), b0y2 = bwd(g, y[2], 0);
  const Array b0y1 = bwd(g, y[1], 0), b1y0 = bwd(g, y[0], 1);
  const std::array<Array, 3> gq = {fwd(g, q, 0), fwd(g, q, 1), fwd(g, q, 2)};

  for (auto& comp : out.comp) comp.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double w = pen == Penalty::EpsInsideDivergence ? c.s : c.s * c.eps[p];
    out.comp[0][p] = (b1y2[p] - b2y1[p]) - w * gq[0][p];
    out.comp[1][p] = (b2y0[p] - b0y2[p]) - w * gq[1][p];
    out.comp[2][p] = (b0y1[p] - b1y0[p]) - w * gq[2][p];
  }
}

void leapfrog_interior(const Grid3& g, const VectorFrame& prev, const VectorFrame& curr,
                       const Coefficients& c, double tau, VectorFrame& next) {
  VectorFrame op(g.size());
  apply_operator(g, curr, c, Penalty::EpsInsideDivergence, op);
  const double tau2 = tau * tau;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!interior(g, p)) continue;
    for (int a = 0; a < 3; ++a)
      next.comp[a][p] = 2.0 * curr.comp[a][p] - prev.comp[a][p] - tau2 / c.eps[p] * op.comp[a][p];
  }
}

void reverse_leapfrog_interior(const Grid3& g, const VectorFrame& u_next, const Coefficients& c,
                               double tau, VectorFrame& u_curr, VectorFrame& u_prev) {
  const std::size_t n = g.size();
  VectorFrame scaled(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (!interior(g, p)) continue;
    for (int a = 0; a < 3; ++a) scaled.comp[a][p] = u_next.comp[a][p] / c.eps[p];
  }
  VectorFrame op(n);
  apply_operator(g, scaled, c, Penalty::EpsOutsideGradient, op);
  const double tau2 = tau * tau;
  for (std::size_t p = 0; p < n; ++p) {
    const bool in = interior(g, p);
    for (int a = 0; a < 3; ++a) {
      u_curr.comp[a][p] += (in ? 2.0 * u_next.comp[a][p] : 0.0) - tau2 * op.comp[a][p];
      if (in) u_prev.comp[a][p] -= u_next.comp[a][p];
    }
  }
}

}  // namespace serial
}  // namespace emrecon::kernels
