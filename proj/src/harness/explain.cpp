// SPDX-License-Identifier: Apache-2.0
#include "ddi/harness/explain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "ddi/chem/tokenizer.hpp"
#include "ddi/common/error.hpp"
#include "ddi/model/head.hpp"

namespace ddi::harness {
namespace {

std::string xmlEscape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// white -> red ramp
std::string heatColor(double w) {
  const int g = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(w, 0.0, 1.0))));
  return fmt::format("rgb(255,{},{})", g, g);
}

std::vector<std::string> motifLabels(const std::string& smiles, int limit) {
  auto fragments = chem::decompose(smiles);
  if (static_cast<int>(fragments.size()) > limit) fragments.resize(static_cast<std::size_t>(limit));
  return fragments;
}

}  // namespace

nlohmann::json AttentionExplanation::toJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    std::vector<double> row(table.row(r).data(), table.row(r).data() + table.cols());
    rows.push_back({{"query", queries[static_cast<std::size_t>(r)]}, {"weights", row}});
  }
  auto block = [](const std::vector<std::string>& motifs, const std::vector<double>& weights) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < motifs.size(); ++i) out.push_back({{"slot", i}, {"motif", motifs[i]}, {"weight", weights[i]}});
    return out;
  };
  return {{"drug_x", drug_x},
          {"drug_y", drug_y},
          {"per_drug_len", per_drug_len},
          {"motifs_x", block(motifs_x, weights_x)},
          {"motifs_y", block(motifs_y, weights_y)},
          {"query_table", rows},
          {"probabilities", probabilities},
          {"predicted", predicted}};
}

void reduceAttention(const std::vector<MatrixD>& probs, const std::vector<bool>& key_mask, int per_drug_len,
                     AttentionExplanation& out) {
  const auto n = static_cast<Eigen::Index>(key_mask.size());
  require(!probs.empty(), ErrorCode::kEmptyInput, "no attention heads");
  require(n == 2 * per_drug_len, ErrorCode::kShapeMismatch, "key mask length must be 2L");
  for (const auto& p : probs) {
    require(p.rows() == n && p.cols() == n, ErrorCode::kShapeMismatch, "attention matrices must be 2L x 2L");
  }
  out.per_drug_len = per_drug_len;
  out.queries.clear();
  for (Eigen::Index q = 0; q < n; ++q)
    if (key_mask[static_cast<std::size_t>(q)]) out.queries.push_back(static_cast<int>(q));
  require(!out.queries.empty(), ErrorCode::kAllMasked, "pair has no motif tokens");

  out.table = MatrixD::Zero(static_cast<Eigen::Index>(out.queries.size()), n);
  for (std::size_t r = 0; r < out.queries.size(); ++r) {
    for (const auto& p : probs) out.table.row(static_cast<Eigen::Index>(r)) += p.row(out.queries[r]);
  }
  out.table /= static_cast<double>(probs.size());

  const Eigen::VectorXd mass = out.table.colwise().mean().transpose();
  auto block = [&](int offset) {
    std::vector<double> w;
    for (int i = 0; i < per_drug_len; ++i)
      if (key_mask[static_cast<std::size_t>(offset + i)]) w.push_back(mass(offset + i));
    double total = 0;
    for (double v : w) total += v;
    if (total > 0)
      for (double& v : w) v /= total;
    return w;
  };
  out.weights_x = block(0);
  out.weights_y = block(per_drug_len);
}

AttentionExplanation explainAttention(Session& session, const std::string& drug_x, const std::string& drug_y) {
  const Matrix<float> logits = session.forwardPair(drug_x, drug_y);
  const auto pred = model::predictions(logits).front();
  auto& fusion = session.model().fusion();
  const auto& attention = fusion.layer(fusion.numLayers() - 1).attention;
  std::vector<MatrixD> heads;
  for (int h = 0; h < attention.heads(); ++h) heads.push_back(attention.probabilities()[static_cast<std::size_t>(h)].cast<double>());

  const int len = session.config().seq_len;
  const auto joined = chem::joinPair(session.sequence(drug_x), session.sequence(drug_y));
  AttentionExplanation e;
  e.drug_x = drug_x;
  e.drug_y = drug_y;
  e.probabilities = pred.probs;
  e.predicted = pred.label;
  reduceAttention(heads, joined.key_mask, len, e);
  e.motifs_x = motifLabels(session.dataset().drug(drug_x).smiles, len);
  e.motifs_y = motifLabels(session.dataset().drug(drug_y).smiles, len);
  require(e.motifs_x.size() == e.weights_x.size() && e.motifs_y.size() == e.weights_y.size(), ErrorCode::kShapeMismatch,
          "motif labels do not line up with sequence slots");
  return e;
}

std::string attentionSvg(const AttentionExplanation& e) {
  constexpr int kCell = 44, kLeft = 20, kLabel = 110;
  const int slots = static_cast<int>(std::max(e.motifs_x.size(), e.motifs_y.size()));
  const int n = 2 * e.per_drug_len;
  const int cell_t = std::max(8, std::min(18, 640 / std::max(1, n)));
  const int width = std::max(kLeft * 2 + slots * kCell, kLeft * 2 + 40 + n * cell_t);
  const int strip_h = 30 + kCell + kLabel;
  const int table_top = 2 * strip_h + 30;
  const int height = table_top + static_cast<int>(e.queries.size()) * cell_t + 40;

  std::ostringstream svg;
  svg << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="monospace" font-size="10">)",
                     width, height)
      << "\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  auto strip = [&](int top, const std::string& id, const std::vector<std::string>& motifs, const std::vector<double>& w) {
    svg << fmt::format(R"(<text x="{}" y="{}" font-size="13">{}</text>)", kLeft, top + 16, xmlEscape(id)) << "\n";
    for (std::size_t i = 0; i < motifs.size(); ++i) {
      const int x = kLeft + static_cast<int>(i) * kCell;
      svg << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="black"/>)", x, top + 24, kCell,
                         kCell, heatColor(w[i]))
          << fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{:.3f}</text>)", x + kCell / 2, top + 24 + kCell / 2 + 4,
                         w[i])
          << fmt::format(R"svg(<text transform="translate({},{}) rotate(50)">{}</text>)svg", x + 6, top + 30 + kCell,
                         xmlEscape(motifs[i]))
          << "\n";
    }
  };
  strip(0, e.drug_x, e.motifs_x, e.weights_x);
  strip(strip_h, e.drug_y, e.motifs_y, e.weights_y);

  const double peak = e.table.size() > 0 ? std::max(e.table.maxCoeff(), 1e-12) : 1.0;
  svg << fmt::format(R"(<text x="{}" y="{}" font-size="12">final-layer attention, queries x keys (head mean)</text>)", kLeft,
                     table_top - 8)
      << "\n";
  for (Eigen::Index r = 0; r < e.table.rows(); ++r) {
    const int y = table_top + static_cast<int>(r) * cell_t;
    svg << fmt::format(R"(<text x="{}" y="{}">{}</text>)", kLeft, y + cell_t - 2, e.queries[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < e.table.cols(); ++c) {
      svg << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>)", kLeft + 40 + static_cast<int>(c) * cell_t,
                         y, cell_t, cell_t, heatColor(e.table(r, c) / peak));
    }
    svg << "\n";
  }
  svg << fmt::format(R"(<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="blue"/>)", kLeft + 40 + e.per_drug_len * cell_t,
                     table_top, table_top + static_cast<int>(e.table.rows()) * cell_t)
      << "\n</svg>\n";
  return svg.str();
}

MatrixD gradCamRaw(const Tensor<float>& features, const Tensor<float>& grads, std::size_t sample) {
  require(features.rank() == 4 && features.shape() == grads.shape(), ErrorCode::kShapeMismatch,
          "feature map and gradient must share an N x C x h x w shape");
  require(sample < features.dim(0), ErrorCode::kIndexOutOfRange, "sample outside the feature map");
  const std::size_t c = features.dim(1), h = features.dim(2), w = features.dim(3), plane = h * w;
  MatrixD cam = MatrixD::Zero(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(w));
  for (std::size_t ch = 0; ch < c; ++ch) {
    const float* a = features.data() + (sample * c + ch) * plane;
    const float* g = grads.data() + (sample * c + ch) * plane;
    double alpha = 0;
    for (std::size_t k = 0; k < plane; ++k) alpha += g[k];
    alpha /= static_cast<double>(plane);
    for (std::size_t k = 0; k < plane; ++k) cam.data()[k] += alpha * a[k];
  }
  return cam.cwiseMax(0.0);
}

MatrixD normalizeSaliency(const MatrixD& raw, double threshold) {
  MatrixD out = MatrixD::Zero(raw.rows(), raw.cols());
  if (raw.size() == 0) return out;
  const double lo = raw.minCoeff(), hi = raw.maxCoeff();
  if (!(hi > lo)) return out;  // constant map
  out = (raw.array() - lo) / (hi - lo);
  out = (out.array() < threshold).select(0.0, out);
  return out;
}

namespace {

imaging::Image8 frameImage(const Tensor<float>& views, int frame) {
  const int s = static_cast<int>(views.dim(2));
  imaging::Image8 img(s, s);
  const std::size_t plane = static_cast<std::size_t>(s) * static_cast<std::size_t>(s);
  const float* base = views.data() + static_cast<std::size_t>(frame) * 3 * plane;
  for (int y = 0; y < s; ++y)
    for (int x = 0; x < s; ++x) {
      imaging::Color c{};
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const float v = base[ch * plane + static_cast<std::size_t>(y * s + x)];
        c[ch] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
      }
      img.set(y, x, c);
    }
  return img;
}

imaging::Image8 overlaySaliency(const imaging::Image8& frame, const MatrixD& saliency) {
  imaging::Image8 small(static_cast<int>(saliency.rows()), static_cast<int>(saliency.cols()));
  for (Eigen::Index y = 0; y < saliency.rows(); ++y)
    for (Eigen::Index x = 0; x < saliency.cols(); ++x) {
      const auto v = static_cast<std::uint8_t>(std::lround(255.0 * saliency(y, x)));
      small.set(static_cast<int>(y), static_cast<int>(x), {v, v, v});
    }
  const imaging::Image8 mask = imaging::resizeBilinear(small, frame.height, frame.width);
  imaging::Image8 out = frame;
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x) {
      const double a = 0.6 * mask.at(y, x)[0] / 255.0;
      const auto p = frame.at(y, x);
      out.set(y, x,
              {static_cast<std::uint8_t>(std::lround((1 - a) * p[0] + a * 255)),
               static_cast<std::uint8_t>(std::lround((1 - a) * p[1])), static_cast<std::uint8_t>(std::lround((1 - a) * p[2]))});
    }
  return out;
}

}  // namespace

GradCamResult explainGradCam(Session& session, const std::string& drug_x, const std::string& drug_y,
                             const std::vector<int>& frames, int target_class, double threshold) {
  if (session.config().modalityKind() != model::Modality::k3d) {
    fail(ErrorCode::kModalityMismatch, "Grad-CAM needs a 3d checkpoint, this one is " + session.config().modality);
  }
  const int views = session.config().imaging.frames;
  for (int f : frames) {
    require(f >= 0 && f < views, ErrorCode::kIndexOutOfRange,
            "frame " + std::to_string(f) + " outside [0, " + std::to_string(views) + ")");
  }
  auto& model = session.model();
  const Matrix<float> logits = session.forwardPair(drug_x, drug_y);
  GradCamResult result;
  const auto pred = model::predictions(logits).front();
  result.probabilities = pred.probs;
  result.target_class = target_class < 0 ? pred.label : target_class;
  require(result.target_class < logits.cols(), ErrorCode::kIndexOutOfRange, "target class outside the label set");

  Matrix<float> dlogits = Matrix<float>::Zero(1, logits.cols());
  dlogits(0, result.target_class) = 1.0f;
  model.zeroGrad();
  model.backward(dlogits);
  if (session.config().freeze_encoder) {
    // the model skips the frozen encoder; saliency still needs its gradient
    const Eigen::Index e = model.encoder().embeddingDim();
    const Matrix<float>& dv = model.lastVisualGrad();
    Matrix<float> demb = Matrix<float>::Zero(drug_x == drug_y ? 1 : 2, e);
    demb.row(0) += dv.block(0, 0, 1, e);
    demb.row(demb.rows() - 1) += dv.block(0, e, 1, e);
    model.encoder().backward(demb);
  }
  const Tensor<float>& features = model.encoder().backbone().lastFeatureMap();
  const Tensor<float>& grads = model.encoder().backbone().lastFeatureGrad();

  std::vector<std::string> drugs{drug_x};
  if (drug_y != drug_x) drugs.push_back(drug_y);
  for (std::size_t d = 0; d < drugs.size(); ++d) {
    const Tensor<float>& stack = session.images().views3d(drugs[d]);
    for (int f : frames) {
      GradCamFrame out;
      out.drug_id = drugs[d];
      out.frame = f;
      out.saliency = normalizeSaliency(gradCamRaw(features, grads, d * static_cast<std::size_t>(views) + static_cast<std::size_t>(f)),
                                       threshold);
      out.overlay = overlaySaliency(frameImage(stack, f), out.saliency);
      result.frames.push_back(std::move(out));
    }
  }
  model.zeroGrad();
  return result;
}

}  // namespace ddi::harness
