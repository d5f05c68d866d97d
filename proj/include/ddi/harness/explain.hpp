// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "ddi/common/tensor.hpp"
#include "ddi/harness/session.hpp"
#include "ddi/imaging/image.hpp"

namespace ddi::harness {

using MatrixD = Matrix<double>;

//! Final-layer attention reduced to motif scores for one drug pair.
struct AttentionExplanation {
  std::string drug_x, drug_y;
  int per_drug_len = 0;
  std::vector<std::string> motifs_x, motifs_y;  // fragment SMILES of the unpadded slots
  std::vector<double> weights_x, weights_y;     // mass per motif, normalized within each drug
  std::vector<int> queries;                     // unpadded positions, in order
  MatrixD table;                                // queries x 2L, head-averaged attention rows
  std::vector<double> probabilities;
  int predicted = 0;

  nlohmann::json toJson() const;
};

//! Reduction used by explainAttention: `probs` holds one n x n matrix per
//! head (query rows), `key_mask` flags real tokens, n = 2L. The table keeps
//! unmasked query rows averaged over heads; motif weights are the column
//! means of the table, renormalized to sum to 1 within each drug's block.
void reduceAttention(const std::vector<MatrixD>& probs, const std::vector<bool>& key_mask, int per_drug_len,
                     AttentionExplanation& out);

AttentionExplanation explainAttention(Session& session, const std::string& drug_x, const std::string& drug_y);

//! Bar-strip heat map of both drugs' motif weights plus the query table.
std::string attentionSvg(const AttentionExplanation& e);

//! ReLU(sum_c alpha_c A_c) for one sample of an N x C x h x w feature map,
//! alpha_c being the spatial mean of the gradient on channel c.
MatrixD gradCamRaw(const Tensor<float>& features, const Tensor<float>& grads, std::size_t sample);

//! Min-max scales to [0,1] (a constant map becomes all zeros) and sets
//! values below `threshold` to 0.
MatrixD normalizeSaliency(const MatrixD& raw, double threshold = 0.5);

struct GradCamFrame {
  std::string drug_id;
  int frame = 0;
  MatrixD saliency;        // final-stage resolution, thresholded
  imaging::Image8 overlay;  // frame with the upsampled saliency blended in red
};

struct GradCamResult {
  int target_class = 0;
  std::vector<double> probabilities;
  std::vector<GradCamFrame> frames;
};

//! Backpropagates the chosen class score (the predicted class when
//! target_class < 0) to the last convolutional stage for the pair's view
//! stacks. Only 3d sessions qualify (kModalityMismatch otherwise).
GradCamResult explainGradCam(Session& session, const std::string& drug_x, const std::string& drug_y,
                             const std::vector<int>& frames, int target_class = -1, double threshold = 0.5);

}  // namespace ddi::harness
