// SPDX-License-Identifier: Apache-2.0
#include "ddi/harness/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "ddi/common/error.hpp"
#include "ddi/common/random.hpp"

namespace ddi::harness {

using MatrixD = nn::Matrix<double>;

namespace {

// Row-conditional affinities with a per-row bandwidth found by bisection so
// that each row's entropy matches log(perplexity).
MatrixD conditionalAffinities(const MatrixD& d2, double perplexity) {
  const Eigen::Index n = d2.rows();
  const double target = std::log(perplexity);
  MatrixD p = MatrixD::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double beta = 1.0, lo = -INFINITY, hi = INFINITY;
    Eigen::RowVectorXd row(n);
    for (int iter = 0; iter < 200; ++iter) {
      double sum = 0;
      double min_d = INFINITY;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i) min_d = std::min(min_d, d2(i, j));
      for (Eigen::Index j = 0; j < n; ++j) {
        row(j) = j == i ? 0.0 : std::exp(-beta * (d2(i, j) - min_d));
        sum += row(j);
      }
      double h = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        row(j) /= sum;
        h += beta * (d2(i, j) - min_d) * row(j);
      }
      h += std::log(sum);  // entropy of the row distribution
      if (std::abs(h - target) < 1e-6) break;
      if (h > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2 : (beta + hi) / 2;
      } else {
        hi = beta;
        beta = std::isinf(lo) ? beta / 2 : (beta + lo) / 2;
      }
    }
    p.row(i) = row;
  }
  return p;
}

}  // namespace

MatrixD jointAffinities(const MatrixD& x, double perplexity) {
  const Eigen::Index n = x.rows();
  MatrixD d2(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d2(i, j) = (x.row(i) - x.row(j)).squaredNorm();
  const MatrixD p = conditionalAffinities(d2, perplexity);
  return ((p + p.transpose()) / (2.0 * static_cast<double>(n))).eval();
}

MatrixD tsne(const MatrixD& x, const TsneParams& params) {
  const Eigen::Index n = x.rows();
  if (n < 2) fail(ErrorCode::kTooFewSamples, "t-SNE needs at least 2 samples, got " + std::to_string(n));
  require(params.iterations >= 1 && params.learning_rate >= 0 && params.perplexity > 0, ErrorCode::kConfigError,
          "t-SNE iterations, learning rate and perplexity must be positive");

  const double perplexity = std::min(params.perplexity, std::max(1.0, static_cast<double>(n - 1) / 3.0));
  MatrixD p = jointAffinities(x, perplexity).cwiseMax(1e-12);
  p.diagonal().setZero();

  const double rate = params.learning_rate > 0
                          ? params.learning_rate
                          : std::max(static_cast<double>(n) / params.exaggeration / 4.0, 50.0);

  Rng rng(params.seed);
  MatrixD y(n, 2);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = 1e-4 * rng.normal();
  MatrixD velocity = MatrixD::Zero(n, 2), gains = MatrixD::Ones(n, 2), grad(n, 2), num(n, n);

  for (int it = 0; it < params.iterations; ++it) {
    const double exaggeration = it < params.exaggeration_iterations ? params.exaggeration : 1.0;
    const double momentum = it < params.exaggeration_iterations ? 0.5 : 0.8;
    double z = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      num(i, i) = 0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        num(i, j) = num(j, i) = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
        z += 2 * num(i, j);
      }
    }
    grad.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double coeff = 4.0 * (exaggeration * p(i, j) - num(i, j) / z) * num(i, j);
        grad.row(i) += coeff * (y.row(i) - y.row(j));
      }
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      double& g = gains.data()[k];
      g = velocity.data()[k] * grad.data()[k] < 0 ? g + 0.2 : g * 0.8;
      g = std::max(g, 0.01);
      velocity.data()[k] = momentum * velocity.data()[k] - rate * g * grad.data()[k];
      y.data()[k] += velocity.data()[k];
    }
    y.rowwise() -= y.colwise().mean();
  }
  return y;
}

std::vector<int> selectEvents(const std::vector<int>& labels, int low, int high) {
  std::map<int, int> counts;
  for (int l : labels) ++counts[l];
  std::vector<std::pair<int, int>> by_count;  // (count, label)
  for (const auto& [label, c] : counts) by_count.emplace_back(c, label);
  std::sort(by_count.begin(), by_count.end());
  std::set<int> chosen;
  for (int i = 0; i < low && i < static_cast<int>(by_count.size()); ++i) chosen.insert(by_count[static_cast<std::size_t>(i)].second);
  std::stable_sort(by_count.begin(), by_count.end(),
                   [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  for (int i = 0; i < high && i < static_cast<int>(by_count.size()); ++i) chosen.insert(by_count[static_cast<std::size_t>(i)].second);
  return {chosen.begin(), chosen.end()};
}

std::string scatterSvg(const MatrixD& points, const std::vector<int>& labels, const std::string& title) {
  require(static_cast<std::size_t>(points.rows()) == labels.size() && points.cols() == 2, ErrorCode::kShapeMismatch,
          "scatter needs n x 2 points and n labels");
  constexpr int kSize = 600, kMargin = 40, kLegend = 140;
  std::set<int> distinct(labels.begin(), labels.end());
  std::map<int, std::string> colour;
  int k = 0;
  for (int l : distinct) {
    const double hue = 360.0 * k++ / static_cast<double>(std::max<std::size_t>(1, distinct.size()));
    colour[l] = fmt::format("hsl({:.0f},70%,45%)", hue);
  }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (points.rows() > 0) {
    x0 = points.col(0).minCoeff(), x1 = points.col(0).maxCoeff();
    y0 = points.col(1).minCoeff(), y1 = points.col(1).maxCoeff();
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  auto sx = [&](double v) { return kMargin + (v - x0) / span * (kSize - 2 * kMargin); };
  auto sy = [&](double v) { return kSize - kMargin - (v - y0) / span * (kSize - 2 * kMargin); };

  std::ostringstream svg;
  svg << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="11">)",
                     kSize + kLegend, kSize)
      << "\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << fmt::format(R"(<text x="{}" y="20" font-size="14">{}</text>)", kMargin, title) << "\n";
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    svg << fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="3" fill="{}" fill-opacity="0.8"/>)", sx(points(i, 0)),
                       sy(points(i, 1)), colour[labels[static_cast<std::size_t>(i)]])
        << "\n";
  }
  int row = 0;
  for (int l : distinct) {
    const int y = kMargin + 16 * row++;
    svg << fmt::format(R"(<circle cx="{}" cy="{}" r="4" fill="{}"/><text x="{}" y="{}">event {}</text>)", kSize + 10, y,
                       colour[l], kSize + 20, y + 4, l)
        << "\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace ddi::harness
