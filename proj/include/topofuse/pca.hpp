// Principal component analysis through a cyclic Jacobi eigensolver.
#pragma once

#include <cstddef>
#include <vector>

namespace topofuse {

/// Dense row-major symmetric eigenproblem result, eigenvalues descending.
struct EigenDecomposition {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]
  int sweeps = 0;
};

struct JacobiOptions {
  double tolerance = 1e-12;  // stop when off-diagonal norm <= tolerance * ||A||_F
  int max_sweeps = 100;
};

/// Throws Error when the off-diagonal mass has not vanished after max_sweeps.
EigenDecomposition jacobi_eigen(std::vector<std::vector<double>> symmetric, const JacobiOptions& opts = {});

struct PcaResult {
  std::vector<std::vector<double>> coordinates;  // N x components
  std::vector<double> eigenvalues;               // components, descending
  std::vector<std::vector<double>> axes;         // components x D, unit length
  std::vector<double> means;                     // D column means
};

/// Sample covariance (divisor N - 1). Each axis is signed so that its
/// largest-magnitude entry is positive (first such entry on ties).
PcaResult pca_project(const std::vector<std::vector<double>>& rows, std::size_t components = 3,
                      const JacobiOptions& opts = {});

std::vector<std::vector<double>> covariance(const std::vector<std::vector<double>>& rows);

}  // namespace topofuse
