#include "topofuse/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topofuse/error.hpp"

namespace topofuse {

namespace {

double off_diagonal_norm(const std::vector<std::vector<double>>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i != j) s += a[i][j] * a[i][j];
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigen(std::vector<std::vector<double>> a, const JacobiOptions& opts) {
  const std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw Error("jacobi_eigen needs a square matrix");

  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  double frob = 0.0;
  for (const auto& row : a)
    for (const double x : row) frob += x * x;
  frob = std::sqrt(frob);

  int sweep = 0;
  while (off_diagonal_norm(a) > opts.tolerance * frob) {
    if (sweep == opts.max_sweeps) {
      throw Error("Jacobi eigensolver did not converge in " + std::to_string(opts.max_sweeps) + " sweeps");
    }
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p][q];
        if (apq == 0.0) continue;
        // Symmetric 2x2 Schur rotation annihilating a[p][q].
        const double tau = (a[q][q] - a[p][p]) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });

  EigenDecomposition out;
  out.sweeps = sweep;
  for (const std::size_t k : idx) {
    out.values.push_back(a[k][k]);
    std::vector<double> vec(n);
    for (std::size_t i = 0; i < n; ++i) vec[i] = v[i][k];
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

std::vector<std::vector<double>> covariance(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  if (n < 2) throw Error("covariance needs at least two rows");
  const std::size_t d = rows.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows) {
    if (r.size() != d) throw Error("ragged data matrix");
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  std::vector<double> centered(d);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) centered[j] = r[j] - mean[j];
    for (std::size_t i = 0; i < d; ++i) {
      if (centered[i] == 0.0) continue;
      for (std::size_t j = i; j < d; ++j) cov[i][j] += centered[i] * centered[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      cov[i][j] /= static_cast<double>(n - 1);
      cov[j][i] = cov[i][j];
    }
  return cov;
}

PcaResult pca_project(const std::vector<std::vector<double>>& rows, std::size_t components,
                      const JacobiOptions& opts) {
  if (rows.size() < 2) throw Error("PCA needs at least two samples");
  const std::size_t d = rows.front().size();
  if (d < components) throw Error("PCA needs at least as many columns as components");

  const EigenDecomposition eig = jacobi_eigen(covariance(rows), opts);

  PcaResult res;
  res.means.assign(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) res.means[j] += r[j];
  for (auto& m : res.means) m /= static_cast<double>(rows.size());

  for (std::size_t k = 0; k < components; ++k) {
    std::vector<double> axis = eig.vectors[k];
    std::size_t arg = 0;
    for (std::size_t j = 1; j < d; ++j)
      if (std::abs(axis[j]) > std::abs(axis[arg])) arg = j;
    if (axis[arg] < 0.0)
      for (auto& x : axis) x = -x;
    res.axes.push_back(std::move(axis));
    res.eigenvalues.push_back(eig.values[k]);
  }
  for (const auto& r : rows) {
    std::vector<double> coord(components, 0.0);
    for (std::size_t k = 0; k < components; ++k)
      for (std::size_t j = 0; j < d; ++j) coord[k] += (r[j] - res.means[j]) * res.axes[k][j];
    res.coordinates.push_back(std::move(coord));
  }
  return res;
}

}  // namespace topofuse
