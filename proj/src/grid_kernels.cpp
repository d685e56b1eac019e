#include "tdlhf/tdlhf_grid.hpp"

#include <cmath>

namespace tdlhf::grid {

namespace {

// Channel contribution by the factored route: rho = Psi Psi^H is formed row
// by row, and the triple product goes through G = Psi^H (w o rho) Psi, which
// is only n_orb x n_orb.
void add_channel_parallel(const CMat &psi, const Mat &w, double dx,
                          ExchangeKernel &out) {
  const Eigen::Index n = psi.rows(), m = psi.cols();
  if (m == 0)
    return;
  CMat y(n, m); // (w o rho) Psi
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<cd> row(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      cd r{};
      for (Eigen::Index a = 0; a < m; ++a)
        r += psi(i, a) * std::conj(psi(j, a));
      out.K(i, j) += std::norm(r);
      row[static_cast<std::size_t>(j)] = w(i, j) * r;
    }
    for (Eigen::Index b = 0; b < m; ++b) {
      cd s{};
      for (Eigen::Index j = 0; j < n; ++j)
        s += row[static_cast<std::size_t>(j)] * psi(j, b);
      y(i, b) = s;
    }
  }
  // Reduction over rows in fixed order, independent of the thread count.
  CMat gmat = CMat::Zero(m, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index b = 0; b < m; ++b)
      for (Eigen::Index a = 0; a < m; ++a)
        gmat(a, b) += std::conj(psi(i, a)) * y(i, b);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    cd t{};
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b)
        t += psi(i, a) * gmat(a, b) * std::conj(psi(i, b));
    out.triple(i) += dx * dx * t.real();
  }
}

// Reference: the double sum written out over the full matrices.
void add_channel_serial(const CMat &psi, const Mat &w, double dx,
                        ExchangeKernel &out) {
  const Eigen::Index n = psi.rows();
  if (psi.cols() == 0)
    return;
  const CMat rho = psi * psi.adjoint();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out.K(i, j) += std::norm(rho(i, j));
  for (Eigen::Index i = 0; i < n; ++i) {
    cd t{};
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        t += rho(i, j) * w(j, k) * rho(j, k) * rho(k, i);
    out.triple(i) += dx * dx * t.real();
  }
}

ExchangeKernel empty_kernel(Eigen::Index n) {
  return {Mat::Zero(n, n), Vec::Zero(n), Vec::Zero(n)};
}

} // namespace

ExchangeKernel assemble_kernel_serial(const DensityMatrix &dm, const Mat &w,
                                      double dx) {
  auto out = empty_kernel(dm.up.rows());
  add_channel_serial(dm.up, w, dx, out);
  add_channel_serial(dm.down, w, dx, out);
  for (Eigen::Index i = 0; i < out.K.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < out.K.cols(); ++j)
      s += w(i, j) * out.K(i, j);
    out.wk(i) = dx * s;
  }
  return out;
}

ExchangeKernel assemble_kernel_parallel(const DensityMatrix &dm, const Mat &w,
                                        double dx) {
  auto out = empty_kernel(dm.up.rows());
  add_channel_parallel(dm.up, w, dx, out);
  add_channel_parallel(dm.down, w, dx, out);
  const Eigen::Index n = out.K.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      s += w(i, j) * out.K(i, j);
    out.wk(i) = dx * s;
  }
  return out;
}

Vec hartree_serial(const Vec &n, const Mat &w, double dx) {
  Vec v(n.size());
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n.size(); ++j)
      s += w(i, j) * n(j);
    v(i) = dx * s;
  }
  return v;
}

Vec hartree_parallel(const Vec &n, const Mat &w, double dx) {
  Vec v(n.size());
  const Eigen::Index size = n.size();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < size; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < size; ++j)
      s += w(i, j) * n(j);
    v(i) = dx * s;
  }
  return v;
}

Vec hartree_potential(const Vec &n, const Mat &w, double dx, bool parallel) {
  return parallel ? hartree_parallel(n, w, dx) : hartree_serial(n, w, dx);
}

} // namespace tdlhf::grid
