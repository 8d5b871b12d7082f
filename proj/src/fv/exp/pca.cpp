#include "fv/exp/pca.hpp"

#include <cmath>

#include "fv/errors.hpp"
#include "fv/rng.hpp"

namespace fv::exp {
namespace {

constexpr double kTol = 1e-10;
constexpr int kMaxIter = 10000;

void matvec(const std::vector<double>& m, int dim, const std::vector<double>& v,
            std::vector<double>& out) {
  for (int i = 0; i < dim; ++i) {
    const double* row = m.data() + static_cast<size_t>(i) * dim;
    double acc = 0.0;
    for (int j = 0; j < dim; ++j) acc += row[j] * v[static_cast<size_t>(j)];
    out[static_cast<size_t>(i)] = acc;
  }
}

double norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

void orthogonalize(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  for (const auto& b : basis) {
    double dot = 0.0;
    for (size_t i = 0; i < v.size(); ++i) dot += v[i] * b[i];
    for (size_t i = 0; i < v.size(); ++i) v[i] -= dot * b[i];
  }
}

}  // namespace

PcaResult pca_project(const std::vector<std::vector<double>>& rows, int k) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw EmptyInputError("no rows for the principal-axis analysis");
  const int dim = static_cast<int>(rows.front().size());
  if (n <= k) throw DimensionError("need more rows than requested components");

  std::vector<double> mean(static_cast<size_t>(dim), 0.0);
  for (const auto& r : rows) {
    for (int j = 0; j < dim; ++j) mean[static_cast<size_t>(j)] += r[static_cast<size_t>(j)];
  }
  for (double& m : mean) m /= n;

  std::vector<std::vector<double>> centered(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    centered[i].resize(static_cast<size_t>(dim));
    for (int j = 0; j < dim; ++j) {
      centered[i][static_cast<size_t>(j)] =
          rows[i][static_cast<size_t>(j)] - mean[static_cast<size_t>(j)];
    }
  }

  // Sample covariance, 1/(n-1) convention.
  std::vector<double> cov(static_cast<size_t>(dim) * dim, 0.0);
  for (const auto& r : centered) {
    for (int i = 0; i < dim; ++i) {
      const double ri = r[static_cast<size_t>(i)];
      double* row = cov.data() + static_cast<size_t>(i) * dim;
      for (int j = 0; j < dim; ++j) row[j] += ri * r[static_cast<size_t>(j)];
    }
  }
  for (double& c : cov) c /= (n - 1);
  double trace = 0.0;
  for (int i = 0; i < dim; ++i) trace += cov[static_cast<size_t>(i) * dim + i];

  PcaResult res;
  Rng rng(0x9c0ffee1u);
  for (int comp = 0; comp < k; ++comp) {
    std::vector<double> v(static_cast<size_t>(dim));
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    orthogonalize(v, res.components);
    double nv = norm(v);
    if (nv == 0.0) break;
    for (double& x : v) x /= nv;

    std::vector<double> next(static_cast<size_t>(dim));
    double eigen = 0.0;
    for (int iter = 0; iter < kMaxIter; ++iter) {
      matvec(cov, dim, v, next);
      orthogonalize(next, res.components);
      const double nn = norm(next);
      if (nn <= trace * 1e-14) {
        eigen = 0.0;
        break;
      }
      double diff = 0.0;
      for (size_t i = 0; i < v.size(); ++i) {
        const double cand = next[i] / nn;
        diff += std::abs(cand - v[i]);
        v[i] = cand;
      }
      eigen = nn;
      if (diff < kTol) break;
    }
    // Rayleigh quotient for the converged axis.
    matvec(cov, dim, v, next);
    eigen = 0.0;
    for (size_t i = 0; i < v.size(); ++i) eigen += v[i] * next[i];
    if (eigen <= trace * 1e-12) {
      res.rank_deficient = true;
      break;
    }
    res.components.push_back(v);
    res.explained_variance.push_back(eigen);
  }

  res.projections.resize(rows.size());
  for (size_t i = 0; i < centered.size(); ++i) {
    res.projections[i].resize(res.components.size());
    for (size_t c = 0; c < res.components.size(); ++c) {
      double dot = 0.0;
      for (int j = 0; j < dim; ++j) {
        dot += centered[i][static_cast<size_t>(j)] * res.components[c][static_cast<size_t>(j)];
      }
      res.projections[i][c] = dot;
    }
  }
  return res;
}

PcaResult pca_project(const data::Dataset& ds, int k) {
  std::vector<std::vector<double>> rows;
  rows.reserve(ds.size());
  for (const auto& f : ds.frames) rows.push_back(f.iq);
  return pca_project(rows, k);
}

}  // namespace fv::exp
