#pragma once

#include <vector>

#include "fv/data/dataset.hpp"

namespace fv::exp {

struct PcaResult {
  // projections[i] has k entries; components are orthonormal rows of length
  // dim; explained_variance holds the matching eigenvalues, non-increasing.
  std::vector<std::vector<double>> projections;
  std::vector<std::vector<double>> components;
  std::vector<double> explained_variance;
  bool rank_deficient = false;
};

// Top-k principal axes of mean-centered row vectors via power iteration with
// orthogonal deflation (tolerance 1e-10, at most 1e4 iterations per axis).
PcaResult pca_project(const std::vector<std::vector<double>>& rows, int k);

// Frames flattened to 2*len-dimensional vectors.
PcaResult pca_project(const data::Dataset& ds, int k);

}  // namespace fv::exp
