#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "narrativeforge/embedding.hpp"

namespace narrativeforge::kernels {

enum class Execution { parallel, serial };

// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

Matrix to_matrix(const std::vector<Embedding>& vectors);

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

// Cosine with zero-norm rows treated as orthogonal to everything.
double safe_cosine(std::span<const double> a, std::span<const double> b);

/// n x n matrix of cosine similarities between the rows of `m`.
Matrix pairwise_cosine(const Matrix& m, Execution exec = Execution::parallel);

/// For every point, the index of the nearest centroid (ties go to the lower
/// index) and the squared distance to it.
struct Assignment {
  std::vector<int> labels;
  std::vector<double> distance2;
};
Assignment assign_nearest(const Matrix& points, const Matrix& centroids, Execution exec = Execution::parallel);

// Sum in index order so the result does not depend on thread count.
double ordered_sum(std::span<const double> values);

}  // namespace narrativeforge::kernels
