#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "casematch/encoder.hpp"

namespace casematch {

// Affine map + softmax over class logits. weight is row-major
// (num_classes x input_dim).
struct ClassifierHead {
  int num_classes = 0;
  int input_dim = 0;
  std::vector<double> weight;
  std::vector<double> bias;
  double dropout_rate = 0.5;

  static ClassifierHead zeros(int num_classes, int input_dim);
};

struct TrainingConfig {
  int batch_size = 4;
  int epochs = 10;
  // Default tuned for heads over a frozen hashed n-gram backend; fine-tuned
  // transformer backends use 5e-6.
  double learning_rate = 1e-3;
  double dropout_rate = 0.5;
  uint64_t seed = 0;
  std::vector<double> class_weights;  // empty means all ones

  void validate() const;
};

// Adam moment constants; the optimizer contract is fixed.
inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

struct FgmConfig {
  bool enabled = false;
  double epsilon = 1.0;

  void validate() const;
};

// Probability distribution over classes; dropout-free inference path.
std::vector<double> head_forward(const ClassifierHead& head,
                                 const EmbeddingVector& input);

// -class_weights[gold] * ln(probs[gold]), probability floored at 1e-12.
double weighted_cross_entropy(const std::vector<double>& probs, int gold,
                              const std::vector<double>& class_weights);

struct HeadGradients {
  std::vector<double> weight;  // layout matches ClassifierHead::weight
  std::vector<double> bias;
  std::vector<double> input;
};

// Analytic gradients of weighted_cross_entropy(head_forward(input)).
HeadGradients head_gradients(const ClassifierHead& head,
                             const EmbeddingVector& input, int gold,
                             const std::vector<double>& class_weights);

// input + epsilon * g / ||g||2; returns input unchanged when g is zero.
EmbeddingVector fgm_perturb(const EmbeddingVector& input,
                            const std::vector<double>& input_grad,
                            double epsilon);

struct TrainingExample {
  EmbeddingVector input;
  int label = 0;
};

// Mini-batch Adam training with optional adversarial perturbation of the
// input embeddings. Deterministic given the config seed.
ClassifierHead train_head(const std::vector<TrainingExample>& examples,
                          int num_classes, const TrainingConfig& config,
                          const FgmConfig& fgm);

// Flat JSON serialization with caller-supplied metadata.
void save_head(const std::string& path, const ClassifierHead& head,
               const std::string& metadata_json);
struct LoadedHead {
  ClassifierHead head;
  std::string metadata_json;
};
LoadedHead load_head(const std::string& path);

// Throws when the stored shape disagrees with what the caller needs.
void check_head_shape(const ClassifierHead& head, int expected_classes,
                      int expected_input_dim, const std::string& context);

}  // namespace casematch
