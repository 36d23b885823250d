#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "emrecon/kernels.hpp"

namespace emrecon::kernels {

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace omp {

namespace {

struct Layout {
  int nx, ny, nz;
  std::ptrdiff_t sx, sy;
  double h;

  explicit Layout(const Grid3& g)
      : nx(g.count(0)), ny(g.count(1)), nz(g.count(2)), sx(g.stride(0)), sy(g.stride(1)),
        h(g.spacing()) {}
};

// y = mu^-1 curlF(e), q = divB(w), w = eps*e or e.
void first_pass(const Layout& L, const VectorFrame& e, const Coefficients& c, bool eps_inside,
                OperatorWorkspace& ws) {
  const double* e0 = e.comp[0].data();
  const double* e1 = e.comp[1].data();
  const double* e2 = e.comp[2].data();
  const double* eps = c.eps.data();
  const double* mu = c.mu.data();
  double* y0 = ws.y[0].data();
  double* y1 = ws.y[1].data();
  double* y2 = ws.y[2].data();
  double* q = ws.q.data();
  const double h = L.h;

#pragma omp parallel for schedule(static)
  for (int i = 0; i < L.nx; ++i) {
    for (int j = 0; j < L.ny; ++j) {
      const std::ptrdiff_t row = i * L.sx + j * L.sy;
      for (int k = 0; k < L.nz; ++k) {
        const std::ptrdiff_t p = row + k;
        const bool hx = i + 1 < L.nx, hy = j + 1 < L.ny, hz = k + 1 < L.nz;
        // forward differences
        const double d1e2 = ((hy ? e2[p + L.sy] : 0.0) - e2[p]) / h;
        const double d2e1 = ((hz ? e1[p + 1] : 0.0) - e1[p]) / h;
        const double d2e0 = ((hz ? e0[p + 1] : 0.0) - e0[p]) / h;
        const double d0e2 = ((hx ? e2[p + L.sx] : 0.0) - e2[p]) / h;
        const double d0e1 = ((hx ? e1[p + L.sx] : 0.0) - e1[p]) / h;
        const double d1e0 = ((hy ? e0[p + L.sy] : 0.0) - e0[p]) / h;
        y0[p] = (d1e2 - d2e1) / mu[p];
        y1[p] = (d2e0 - d0e2) / mu[p];
        y2[p] = (d0e1 - d1e0) / mu[p];

        // backward divergence
        double w0 = e0[p], w1 = e1[p], w2 = e2[p];
        double m0 = i > 0 ? e0[p - L.sx] : 0.0;
        double m1 = j > 0 ? e1[p - L.sy] : 0.0;
        double m2 = k > 0 ? e2[p - 1] : 0.0;
        if (eps_inside) {
          w0 = eps[p] * w0;
          w1 = eps[p] * w1;
          w2 = eps[p] * w2;
          m0 = i > 0 ? eps[p - L.sx] * m0 : 0.0;
          m1 = j > 0 ? eps[p - L.sy] * m1 : 0.0;
          m2 = k > 0 ? eps[p - 1] * m2 : 0.0;
        }
        q[p] = (w0 - m0) / h + (w1 - m1) / h + (w2 - m2) / h;
      }
    }
  }
}

// out = curlB(y) - s [eps] gradF(q) on all nodes or on interior nodes only.
template <typename Sink>
void second_pass(const Layout& L, const Coefficients& c, bool eps_inside,
                 const OperatorWorkspace& ws, bool interior_only, Sink&& sink) {
  const double* y0 = ws.y[0].data();
  const double* y1 = ws.y[1].data();
  const double* y2 = ws.y[2].data();
  const double* q = ws.q.data();
  const double* eps = c.eps.data();
  const double s = c.s;
  const double h = L.h;
  const int lo = interior_only ? 1 : 0;
  const int off = interior_only ? 1 : 0;

#pragma omp parallel for schedule(static)
  for (int i = lo; i < L.nx - off; ++i) {
    for (int j = lo; j < L.ny - off; ++j) {
      const std::ptrdiff_t row = i * L.sx + j * L.sy;
      for (int k = lo; k < L.nz - off; ++k) {
        const std::ptrdiff_t p = row + k;
        const bool hx = i + 1 < L.nx, hy = j + 1 < L.ny, hz = k + 1 < L.nz;
        const double b1y2 = (y2[p] - (j > 0 ? y2[p - L.sy] : 0.0)) / h;
        const double b2y1 = (y1[p] - (k > 0 ? y1[p - 1] : 0.0)) / h;
        const double b2y0 = (y0[p] - (k > 0 ? y0[p - 1] : 0.0)) / h;
        const double b0y2 = (y2[p] - (i > 0 ? y2[p - L.sx] : 0.0)) / h;
        const double b0y1 = (y1[p] - (i > 0 ? y1[p - L.sx] : 0.0)) / h;
        const double b1y0 = (y0[p] - (j > 0 ? y0[p - L.sy] : 0.0)) / h;
        const double g0 = ((hx ? q[p + L.sx] : 0.0) - q[p]) / h;
        const double g1 = ((hy ? q[p + L.sy] : 0.0) - q[p]) / h;
        const double g2 = ((hz ? q[p + 1] : 0.0) - q[p]) / h;
        const double w = eps_inside ? s : s * eps[p];
        sink(p, i, j, k, (b1y2 - b2y1) - w * g0, (b2y0 - b0y2) - w * g1, (b0y1 - b1y0) - w * g2);
      }
    }
  }
}

}  // namespace

void apply_operator(const Grid3& g, const VectorFrame& e, const Coefficients& c, Penalty pen,
                    OperatorWorkspace& ws, VectorFrame& out) {
  const Layout L(g);
  if (ws.q.size() != g.size()) ws.resize(g.size());
  for (auto& comp : out.comp) comp.resize(g.size());
  const bool inside = pen == Penalty::EpsInsideDivergence;
  first_pass(L, e, c, inside, ws);
  double* o0 = out.comp[0].data();
  double* o1 = out.comp[1].data();
  double* o2 = out.comp[2].data();
  second_pass(L, c, inside, ws, false, [=](std::ptrdiff_t p, int, int, int, double a0, double a1, double a2) {
    o0[p] = a0;
    o1[p] = a1;
    o2[p] = a2;
  });
}

void leapfrog_interior(const Grid3& g, const VectorFrame& prev, const VectorFrame& curr,
                       const Coefficients& c, double tau, OperatorWorkspace& ws,
                       VectorFrame& next) {
  const Layout L(g);
  if (ws.q.size() != g.size()) ws.resize(g.size());
  first_pass(L, curr, c, true, ws);
  const double tau2 = tau * tau;
  const double* eps = c.eps.data();
  const double* c0 = curr.comp[0].data();
  const double* c1 = curr.comp[1].data();
  const double* c2 = curr.comp[2].data();
  const double* p0 = prev.comp[0].data();
  const double* p1 = prev.comp[1].data();
  const double* p2 = prev.comp[2].data();
  double* n0 = next.comp[0].data();
  double* n1 = next.comp[1].data();
  double* n2 = next.comp[2].data();
  second_pass(L, c, true, ws, true, [=](std::ptrdiff_t p, int, int, int, double a0, double a1, double a2) {
    const double f = tau2 / eps[p];
    n0[p] = 2.0 * c0[p] - p0[p] - f * a0;
    n1[p] = 2.0 * c1[p] - p1[p] - f * a1;
    n2[p] = 2.0 * c2[p] - p2[p] - f * a2;
  });
}

void reverse_leapfrog_interior(const Grid3& g, const VectorFrame& u_next, const Coefficients& c,
                               double tau, OperatorWorkspace& ws, VectorFrame& u_curr,
                               VectorFrame& u_prev) {
  const Layout L(g);
  if (ws.q.size() != g.size()) ws.resize(g.size());
  VectorFrame& a = ws.a;
  const double* eps = c.eps.data();

#pragma omp parallel for schedule(static)
  for (int i = 0; i < L.nx; ++i) {
    for (int j = 0; j < L.ny; ++j) {
      const std::ptrdiff_t row = i * L.sx + j * L.sy;
      const bool edge = i == 0 || i == L.nx - 1 || j == 0 || j == L.ny - 1;
      for (int k = 0; k < L.nz; ++k) {
        const std::ptrdiff_t p = row + k;
        const bool in = !edge && k > 0 && k < L.nz - 1;
        for (int d = 0; d < 3; ++d) a.comp[d][p] = in ? u_next.comp[d][p] / eps[p] : 0.0;
      }
    }
  }

  first_pass(L, a, c, false, ws);
  const double tau2 = tau * tau;
  const int nx = L.nx, ny = L.ny, nz = L.nz;
  double* uc[3] = {u_curr.comp[0].data(), u_curr.comp[1].data(), u_curr.comp[2].data()};
  double* up[3] = {u_prev.comp[0].data(), u_prev.comp[1].data(), u_prev.comp[2].data()};
  const double* un[3] = {u_next.comp[0].data(), u_next.comp[1].data(), u_next.comp[2].data()};
  // A^T maps interior multipliers onto every node the interior stencil reads,
  // so boundary nodes receive contributions as well.
  second_pass(L, c, false, ws, false,
              [=](std::ptrdiff_t p, int i, int j, int k, double a0, double a1, double a2) {
                const bool in = i > 0 && i < nx - 1 && j > 0 && j < ny - 1 && k > 0 && k < nz - 1;
                const double op[3] = {a0, a1, a2};
                for (int d = 0; d < 3; ++d) {
                  uc[d][p] += (in ? 2.0 * un[d][p] : 0.0) - tau2 * op[d];
                  if (in) up[d][p] -= un[d][p];
                }
              });
}

}  // namespace omp
}  // namespace emrecon::kernels
