#include "casematch/learning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "casematch/errors.hpp"
#include "casematch/rng.hpp"

namespace casematch {

using nlohmann::json;

ClassifierHead ClassifierHead::zeros(int num_classes, int input_dim) {
  ClassifierHead head;
  head.num_classes = num_classes;
  head.input_dim = input_dim;
  head.weight.assign(static_cast<size_t>(num_classes) *
                         static_cast<size_t>(input_dim),
                     0.0);
  head.bias.assign(static_cast<size_t>(num_classes), 0.0);
  return head;
}

void TrainingConfig::validate() const {
  if (batch_size < 1) throw Error(ErrorKind::kConfig, "batch_size must be >= 1");
  if (epochs < 1) throw Error(ErrorKind::kConfig, "epochs must be >= 1");
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorKind::kConfig, "learning_rate must be positive");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw Error(ErrorKind::kConfig, "dropout_rate must be in [0, 1)");
  }
  for (double w : class_weights) {
    if (!(w > 0.0)) {
      throw Error(ErrorKind::kConfig, "class weights must be positive");
    }
  }
}

void FgmConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::kConfig, "fgm epsilon must be finite and positive");
  }
}

namespace {

void check_input_dim(const ClassifierHead& head, const EmbeddingVector& input) {
  if (static_cast<int>(input.size()) != head.input_dim) {
    throw Error(ErrorKind::kContract,
                "head expects input of length " +
                    std::to_string(head.input_dim) + ", got " +
                    std::to_string(input.size()));
  }
}

std::vector<double> logits_of(const ClassifierHead& head,
                              const EmbeddingVector& input) {
  std::vector<double> logits(static_cast<size_t>(head.num_classes), 0.0);
  for (int c = 0; c < head.num_classes; ++c) {
    const double* row =
        head.weight.data() + static_cast<size_t>(c) * head.input_dim;
    double acc = head.bias[static_cast<size_t>(c)];
    for (int i = 0; i < head.input_dim; ++i) {
      acc += row[i] * input[static_cast<size_t>(i)];
    }
    logits[static_cast<size_t>(c)] = acc;
  }
  return logits;
}

std::vector<double> softmax(std::vector<double> logits) {
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - max_logit);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return logits;
}

double weight_for(const std::vector<double>& class_weights, int gold) {
  if (class_weights.empty()) return 1.0;
  if (gold >= static_cast<int>(class_weights.size())) {
    throw Error(ErrorKind::kContract,
                "class_weights has no entry for class " + std::to_string(gold));
  }
  return class_weights[static_cast<size_t>(gold)];
}

}  // namespace

std::vector<double> head_forward(const ClassifierHead& head,
                                 const EmbeddingVector& input) {
  check_input_dim(head, input);
  return softmax(logits_of(head, input));
}

double weighted_cross_entropy(const std::vector<double>& probs, int gold,
                              const std::vector<double>& class_weights) {
  if (gold < 0 || gold >= static_cast<int>(probs.size())) {
    throw Error(ErrorKind::kContract,
                "gold class " + std::to_string(gold) + " out of range");
  }
  double p = std::max(probs[static_cast<size_t>(gold)], 1e-12);
  return -weight_for(class_weights, gold) * std::log(p);
}

HeadGradients head_gradients(const ClassifierHead& head,
                             const EmbeddingVector& input, int gold,
                             const std::vector<double>& class_weights) {
  check_input_dim(head, input);
  if (gold < 0 || gold >= head.num_classes) {
    throw Error(ErrorKind::kContract,
                "gold class " + std::to_string(gold) + " out of range");
  }
  std::vector<double> probs = softmax(logits_of(head, input));
  double w = weight_for(class_weights, gold);

  // d loss / d logit_c = w * (p_c - [c == gold])
  std::vector<double> dlogits(probs);
  dlogits[static_cast<size_t>(gold)] -= 1.0;
  for (double& v : dlogits) v *= w;

  HeadGradients grads;
  grads.weight.assign(head.weight.size(), 0.0);
  grads.bias = dlogits;
  grads.input.assign(static_cast<size_t>(head.input_dim), 0.0);
  for (int c = 0; c < head.num_classes; ++c) {
    double d = dlogits[static_cast<size_t>(c)];
    const double* row =
        head.weight.data() + static_cast<size_t>(c) * head.input_dim;
    double* grad_row =
        grads.weight.data() + static_cast<size_t>(c) * head.input_dim;
    for (int i = 0; i < head.input_dim; ++i) {
      grad_row[i] = d * input[static_cast<size_t>(i)];
      grads.input[static_cast<size_t>(i)] += d * row[i];
    }
  }
  return grads;
}

EmbeddingVector fgm_perturb(const EmbeddingVector& input,
                            const std::vector<double>& input_grad,
                            double epsilon) {
  if (input.size() != input_grad.size()) {
    throw Error(ErrorKind::kContract,
                "fgm_perturb: input and gradient shapes differ");
  }
  double norm_sq = 0.0;
  for (double g : input_grad) norm_sq += g * g;
  if (norm_sq == 0.0) return input;
  double scale = epsilon / std::sqrt(norm_sq);
  EmbeddingVector out(input);
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] += scale * input_grad[i];
  }
  return out;
}

namespace {

struct AdamState {
  std::vector<double> m_weight, v_weight, m_bias, v_bias;
  int64_t step = 0;

  explicit AdamState(const ClassifierHead& head)
      : m_weight(head.weight.size(), 0.0),
        v_weight(head.weight.size(), 0.0),
        m_bias(head.bias.size(), 0.0),
        v_bias(head.bias.size(), 0.0) {}

  void apply(ClassifierHead& head, const std::vector<double>& grad_weight,
             const std::vector<double>& grad_bias, double lr) {
    ++step;
    double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
    double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
    auto update = [&](std::vector<double>& param, std::vector<double>& m,
                      std::vector<double>& v, const std::vector<double>& g) {
      for (size_t i = 0; i < param.size(); ++i) {
        m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g[i];
        v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
        double m_hat = m[i] / bc1;
        double v_hat = v[i] / bc2;
        param[i] -= lr * m_hat / (std::sqrt(v_hat) + kAdamEps);
      }
    };
    update(head.weight, m_weight, v_weight, grad_weight);
    update(head.bias, m_bias, v_bias, grad_bias);
  }
};

// Inverted dropout mask: kept entries scale by 1 / keep_prob.
std::vector<double> draw_dropout_mask(Rng& rng, size_t size, double rate) {
  std::vector<double> mask(size, 1.0);
  if (rate <= 0.0) return mask;
  double keep = 1.0 - rate;
  for (double& m : mask) {
    m = (rng.next_unit() < rate) ? 0.0 : 1.0 / keep;
  }
  return mask;
}

std::string join_ids(const std::vector<size_t>& batch) {
  std::ostringstream out;
  for (size_t i = 0; i < batch.size(); ++i) {
    if (i) out << ",";
    out << batch[i];
  }
  return out.str();
}

}  // namespace

ClassifierHead train_head(const std::vector<TrainingExample>& examples,
                          int num_classes, const TrainingConfig& config,
                          const FgmConfig& fgm) {
  config.validate();
  fgm.validate();
  if (examples.empty()) {
    throw Error(ErrorKind::kConfig, "training requires at least one example");
  }
  int input_dim = static_cast<int>(examples.front().input.size());
  for (const auto& ex : examples) {
    if (static_cast<int>(ex.input.size()) != input_dim) {
      throw Error(ErrorKind::kContract,
                  "training examples have inconsistent input dims");
    }
    if (ex.label < 0 || ex.label >= num_classes) {
      throw Error(ErrorKind::kContract,
                  "training label " + std::to_string(ex.label) +
                      " out of range for " + std::to_string(num_classes) +
                      " classes");
    }
  }

  Rng rng(config.seed);
  ClassifierHead head = ClassifierHead::zeros(num_classes, input_dim);
  head.dropout_rate = config.dropout_rate;
  double init_range =
      std::sqrt(6.0 / static_cast<double>(input_dim + num_classes));
  for (double& w : head.weight) {
    w = (2.0 * rng.next_unit() - 1.0) * init_range;
  }

  AdamState adam(head);
  std::vector<size_t> order(examples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> grad_weight(head.weight.size());
  std::vector<double> grad_bias(head.bias.size());
  size_t dim = static_cast<size_t>(input_dim);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(config.batch_size)) {
      size_t end = std::min(order.size(),
                            start + static_cast<size_t>(config.batch_size));
      std::vector<size_t> batch(order.begin() + static_cast<long>(start),
                                order.begin() + static_cast<long>(end));
      double batch_scale = 1.0 / static_cast<double>(batch.size());
      std::fill(grad_weight.begin(), grad_weight.end(), 0.0);
      std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
      double batch_loss = 0.0;

      for (size_t idx : batch) {
        const TrainingExample& ex = examples[idx];
        std::vector<double> mask =
            draw_dropout_mask(rng, dim, config.dropout_rate);
        EmbeddingVector dropped(dim);
        for (size_t i = 0; i < dim; ++i) dropped[i] = ex.input[i] * mask[i];

        HeadGradients g =
            head_gradients(head, dropped, ex.label, config.class_weights);
        batch_loss += weighted_cross_entropy(head_forward(head, dropped),
                                             ex.label, config.class_weights);
        for (size_t i = 0; i < grad_weight.size(); ++i) {
          grad_weight[i] += batch_scale * g.weight[i];
        }
        for (size_t i = 0; i < grad_bias.size(); ++i) {
          grad_bias[i] += batch_scale * g.bias[i];
        }

        if (fgm.enabled) {
          // Gradient wrt the undropped embedding, then a second pass on the
          // perturbed copy; the stored example stays untouched.
          std::vector<double> input_grad(dim);
          for (size_t i = 0; i < dim; ++i) input_grad[i] = g.input[i] * mask[i];
          EmbeddingVector adversarial =
              fgm_perturb(ex.input, input_grad, fgm.epsilon);
          std::vector<double> adv_mask =
              draw_dropout_mask(rng, dim, config.dropout_rate);
          EmbeddingVector adv_dropped(dim);
          for (size_t i = 0; i < dim; ++i) {
            adv_dropped[i] = adversarial[i] * adv_mask[i];
          }
          HeadGradients ga = head_gradients(head, adv_dropped, ex.label,
                                            config.class_weights);
          batch_loss += weighted_cross_entropy(
              head_forward(head, adv_dropped), ex.label, config.class_weights);
          for (size_t i = 0; i < grad_weight.size(); ++i) {
            grad_weight[i] += batch_scale * ga.weight[i];
          }
          for (size_t i = 0; i < grad_bias.size(); ++i) {
            grad_bias[i] += batch_scale * ga.bias[i];
          }
        }
      }

      if (!std::isfinite(batch_loss)) {
        throw Error(ErrorKind::kTraining,
                    "non-finite loss at epoch " + std::to_string(epoch) +
                        ", step " + std::to_string(adam.step) +
                        ", batch ids [" + join_ids(batch) + "]");
      }
      adam.apply(head, grad_weight, grad_bias, config.learning_rate);
    }
  }
  return head;
}

void save_head(const std::string& path, const ClassifierHead& head,
               const std::string& metadata_json) {
  json meta = metadata_json.empty()
                  ? json::object()
                  : json::parse(metadata_json, nullptr, false);
  if (meta.is_discarded()) {
    throw Error(ErrorKind::kContract, "head metadata must be valid JSON");
  }
  json j{{"num_classes", head.num_classes},
         {"input_dim", head.input_dim},
         {"weight", head.weight},
         {"bias", head.bias},
         {"dropout_rate", head.dropout_rate},
         {"metadata", std::move(meta)}};
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::kValidation, "cannot write file: " + path);
  }
  out << j.dump(2) << "\n";
}

LoadedHead load_head(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kState, "missing head file: " + path);
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorKind::kParse, path + ": malformed head file");
  }
  LoadedHead loaded;
  try {
    loaded.head.num_classes = j.at("num_classes").get<int>();
    loaded.head.input_dim = j.at("input_dim").get<int>();
    loaded.head.weight = j.at("weight").get<std::vector<double>>();
    loaded.head.bias = j.at("bias").get<std::vector<double>>();
    loaded.head.dropout_rate = j.at("dropout_rate").get<double>();
    loaded.metadata_json = j.value("metadata", json::object()).dump();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  size_t expected_weight = static_cast<size_t>(loaded.head.num_classes) *
                           static_cast<size_t>(loaded.head.input_dim);
  if (loaded.head.weight.size() != expected_weight ||
      loaded.head.bias.size() !=
          static_cast<size_t>(loaded.head.num_classes)) {
    throw Error(ErrorKind::kValidation,
                path + ": stored shapes are inconsistent");
  }
  return loaded;
}

void check_head_shape(const ClassifierHead& head, int expected_classes,
                      int expected_input_dim, const std::string& context) {
  if (head.num_classes != expected_classes ||
      head.input_dim != expected_input_dim) {
    throw Error(ErrorKind::kValidation,
                context + ": head shape (" + std::to_string(head.num_classes) +
                    " x " + std::to_string(head.input_dim) +
                    ") does not match expected (" +
                    std::to_string(expected_classes) + " x " +
                    std::to_string(expected_input_dim) + ")");
  }
}

}  // namespace casematch
