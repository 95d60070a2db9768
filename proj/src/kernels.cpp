#include "narrativeforge/kernels.hpp"

#include <cmath>
#include <limits>

namespace narrativeforge::kernels {

Matrix to_matrix(const std::vector<Embedding>& vectors) {
  if (vectors.empty()) return {};
  Matrix m(vectors.size(), vectors.front().size());
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = vectors[i][j];
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double safe_cosine(std::span<const double> a, std::span<const double> b) {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = dot(a, b) / (na * nb);
  return std::fmax(-1.0, std::fmin(1.0, c));
}

namespace {

// Same arithmetic as safe_cosine, with the row norms computed once up front.
void cosine_row(const Matrix& m, const std::vector<double>& norms, Matrix& out, std::size_t i) {
  for (std::size_t j = 0; j < m.rows; ++j) {
    if (i == j) {
      out.at(i, j) = 1.0;
    } else if (norms[i] == 0.0 || norms[j] == 0.0) {
      out.at(i, j) = 0.0;
    } else {
      const double c = dot(m.row(i), m.row(j)) / (norms[i] * norms[j]);
      out.at(i, j) = std::fmax(-1.0, std::fmin(1.0, c));
    }
  }
}

void nearest_for(const Matrix& points, const Matrix& centroids, Assignment& out, std::size_t i) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows; ++c) {
    const double d = squared_distance(points.row(i), centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  out.labels[i] = best;
  out.distance2[i] = best_d;
}

}  // namespace

Matrix pairwise_cosine(const Matrix& m, Execution exec) {
  Matrix out(m.rows, m.rows);
  std::vector<double> norms(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) norms[i] = std::sqrt(dot(m.row(i), m.row(i)));
  const auto n = static_cast<long long>(m.rows);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) cosine_row(m, norms, out, static_cast<std::size_t>(i));
  } else {
    for (long long i = 0; i < n; ++i) cosine_row(m, norms, out, static_cast<std::size_t>(i));
  }
  return out;
}

Assignment assign_nearest(const Matrix& points, const Matrix& centroids, Execution exec) {
  Assignment out{std::vector<int>(points.rows, 0), std::vector<double>(points.rows, 0.0)};
  const auto n = static_cast<long long>(points.rows);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) nearest_for(points, centroids, out, static_cast<std::size_t>(i));
  } else {
    for (long long i = 0; i < n; ++i) nearest_for(points, centroids, out, static_cast<std::size_t>(i));
  }
  return out;
}

double ordered_sum(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

}  // namespace narrativeforge::kernels
