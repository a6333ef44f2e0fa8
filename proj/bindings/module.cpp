#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "casematch/aligner.hpp"
#include "casematch/corpus.hpp"
#include "casematch/encoder.hpp"
#include "casematch/errors.hpp"
#include "casematch/fsi.hpp"
#include "casematch/learning.hpp"
#include "casematch/matcher.hpp"
#include "casematch/metrics.hpp"
#include "casematch/pipeline.hpp"
#include "casematch/synthetic.hpp"

namespace py = pybind11;
using namespace casematch;

PYBIND11_MODULE(_core, m) {
  m.doc() = "interpretable similar-case matching pipeline";

  py::register_exception<Error>(m, "CasematchError");

  py::enum_<MatchLabel>(m, "MatchLabel")
      .value("NOT_MATCH", MatchLabel::kNotMatch)
      .value("PARTIAL_MATCH", MatchLabel::kPartialMatch)
      .value("MATCH", MatchLabel::kMatch);

  py::enum_<MatchMode>(m, "MatchMode")
      .value("CONCAT", MatchMode::kConcat)
      .value("SIAMESE", MatchMode::kSiamese)
      .value("MATCHING", MatchMode::kMatching);

  py::enum_<InputSource>(m, "InputSource")
      .value("FULL_TEXT", InputSource::kFullText)
      .value("FEATURE_SENTENCES", InputSource::kFeatureSentences);

  py::class_<Sentence>(m, "Sentence")
      .def(py::init<>())
      .def(py::init([](int index, std::string text) {
             return Sentence{index, std::move(text)};
           }),
           py::arg("index"), py::arg("text"))
      .def_readwrite("index", &Sentence::index)
      .def_readwrite("text", &Sentence::text);

  py::class_<Case>(m, "Case")
      .def(py::init<>())
      .def_readwrite("case_id", &Case::case_id)
      .def_readwrite("sentences", &Case::sentences);

  py::class_<CasePair>(m, "CasePair")
      .def(py::init<>())
      .def_readwrite("pair_id", &CasePair::pair_id)
      .def_readwrite("case_a", &CasePair::case_a)
      .def_readwrite("case_b", &CasePair::case_b)
      .def_readwrite("match_label", &CasePair::match_label)
      .def_readwrite("gold_features_a", &CasePair::gold_features_a)
      .def_readwrite("gold_features_b", &CasePair::gold_features_b)
      .def_readwrite("gold_aligned", &CasePair::gold_aligned);

  py::class_<FsiExample>(m, "FsiExample")
      .def_readonly("case_id", &FsiExample::case_id)
      .def_readonly("sentence", &FsiExample::sentence)
      .def_readonly("label", &FsiExample::label);

  py::class_<AlignExample>(m, "AlignExample")
      .def_readonly("pair_id", &AlignExample::pair_id)
      .def_readonly("sentence_a", &AlignExample::sentence_a)
      .def_readonly("sentence_b", &AlignExample::sentence_b)
      .def_readonly("label", &AlignExample::label);

  py::class_<FoldSplit>(m, "FoldSplit")
      .def_readonly("fold_id", &FoldSplit::fold_id)
      .def_readonly("train_pair_ids", &FoldSplit::train_pair_ids)
      .def_readonly("test_pair_ids", &FoldSplit::test_pair_ids);

  m.def("segment_sentences", &segment_sentences, py::arg("raw_text"));
  m.def("load_dataset", &load_dataset, py::arg("path"));
  m.def("save_dataset", &save_dataset, py::arg("path"), py::arg("pairs"));
  m.def("validate_pair", &validate_pair, py::arg("pair"));
  m.def("stratified_kfold", &stratified_kfold, py::arg("pairs"), py::arg("k"),
        py::arg("seed"));
  m.def("build_fsi_dataset", &build_fsi_dataset, py::arg("pairs"));
  m.def("build_alignment_dataset", &build_alignment_dataset, py::arg("pairs"));

  py::class_<EncoderConfig>(m, "EncoderConfig")
      .def(py::init<>())
      .def_readwrite("dim", &EncoderConfig::dim)
      .def_readwrite("max_len_sentence", &EncoderConfig::max_len_sentence)
      .def_readwrite("max_len_case", &EncoderConfig::max_len_case)
      .def_readwrite("ngram_orders", &EncoderConfig::ngram_orders);

  py::class_<Encoder>(m, "Encoder")
      .def(py::init<EncoderConfig>(), py::arg("config"))
      .def("encode", &Encoder::encode, py::arg("text"), py::arg("max_len"))
      .def("encode_joint", &Encoder::encode_joint, py::arg("text_a"),
           py::arg("text_b"), py::arg("max_len"));

  m.def("hashed_ngram_encode", &hashed_ngram_encode, py::arg("text"),
        py::arg("config"));

  py::class_<ClassifierHead>(m, "ClassifierHead")
      .def(py::init<>())
      .def_static("zeros", &ClassifierHead::zeros, py::arg("num_classes"),
                  py::arg("input_dim"))
      .def_readwrite("num_classes", &ClassifierHead::num_classes)
      .def_readwrite("input_dim", &ClassifierHead::input_dim)
      .def_readwrite("weight", &ClassifierHead::weight)
      .def_readwrite("bias", &ClassifierHead::bias)
      .def_readwrite("dropout_rate", &ClassifierHead::dropout_rate);

  py::class_<TrainingConfig>(m, "TrainingConfig")
      .def(py::init<>())
      .def_readwrite("batch_size", &TrainingConfig::batch_size)
      .def_readwrite("epochs", &TrainingConfig::epochs)
      .def_readwrite("learning_rate", &TrainingConfig::learning_rate)
      .def_readwrite("dropout_rate", &TrainingConfig::dropout_rate)
      .def_readwrite("seed", &TrainingConfig::seed)
      .def_readwrite("class_weights", &TrainingConfig::class_weights);

  py::class_<FgmConfig>(m, "FgmConfig")
      .def(py::init<>())
      .def_readwrite("enabled", &FgmConfig::enabled)
      .def_readwrite("epsilon", &FgmConfig::epsilon);

  m.def("head_forward", &head_forward, py::arg("head"), py::arg("input"));
  m.def("weighted_cross_entropy", &weighted_cross_entropy, py::arg("probs"),
        py::arg("gold"), py::arg("class_weights"));
  m.def(
      "head_gradients",
      [](const ClassifierHead& head, const EmbeddingVector& input, int gold,
         const std::vector<double>& class_weights) {
        HeadGradients g = head_gradients(head, input, gold, class_weights);
        return py::make_tuple(g.weight, g.bias, g.input);
      },
      py::arg("head"), py::arg("input"), py::arg("gold"),
      py::arg("class_weights"));
  m.def("fgm_perturb", &fgm_perturb, py::arg("input"), py::arg("input_grad"),
        py::arg("epsilon"));
  m.def(
      "train_head",
      [](const std::vector<std::pair<EmbeddingVector, int>>& examples,
         int num_classes, const TrainingConfig& config, const FgmConfig& fgm) {
        std::vector<TrainingExample> converted;
        converted.reserve(examples.size());
        for (const auto& [input, label] : examples) {
          converted.push_back(TrainingExample{input, label});
        }
        return train_head(converted, num_classes, config, fgm);
      },
      py::arg("examples"), py::arg("num_classes"), py::arg("config"),
      py::arg("fgm"));

  py::class_<FeatureSelection>(m, "FeatureSelection")
      .def_readonly("case_id", &FeatureSelection::case_id)
      .def_readonly("indices", &FeatureSelection::indices)
      .def_readonly("probabilities", &FeatureSelection::probabilities)
      .def_readonly("fallback_used", &FeatureSelection::fallback_used);

  py::class_<FsiModel>(m, "FsiModel")
      .def(py::init<const Encoder*>(), py::arg("encoder"),
           py::keep_alive<1, 2>())
      .def("set_head", &FsiModel::set_head, py::arg("head"))
      .def("score_sentence", &FsiModel::score_sentence, py::arg("sentence"))
      .def("select_features", &FsiModel::select_features, py::arg("case"),
           py::arg("threshold") = 0.5, py::arg("fallback_k") = 3);

  m.def("train_fsi", &train_fsi, py::arg("dataset"), py::arg("encoder"),
        py::arg("config"), py::arg("fgm"));
  m.def("selection_from_gold", &selection_from_gold, py::arg("case"),
        py::arg("gold"));

  m.def("compose_case_text", &compose_case_text, py::arg("case"),
        py::arg("selection"), py::arg("source"));
  m.def("match_features", &match_features, py::arg("encoder"),
        py::arg("text_a"), py::arg("text_b"), py::arg("mode"));

  py::class_<PipelinePrediction>(m, "PipelinePrediction")
      .def(py::init<>())
      .def_readwrite("pair_id", &PipelinePrediction::pair_id)
      .def_readwrite("match_label", &PipelinePrediction::match_label)
      .def_readwrite("features_a", &PipelinePrediction::features_a)
      .def_readwrite("features_b", &PipelinePrediction::features_b)
      .def_readwrite("aligned", &PipelinePrediction::aligned)
      .def_readwrite("conflict_resolved",
                     &PipelinePrediction::conflict_resolved);

  m.def("resolve_conflict", &resolve_conflict, py::arg("prediction"));

  py::class_<SetScore>(m, "SetScore")
      .def_readonly("precision", &SetScore::precision)
      .def_readonly("recall", &SetScore::recall)
      .def_readonly("f1", &SetScore::f1);

  m.def("set_f1",
        static_cast<SetScore (*)(const std::set<int>&, const std::set<int>&)>(
            &set_f1<int>),
        py::arg("predicted"), py::arg("gold"));
  m.def("set_f1_pairs",
        static_cast<SetScore (*)(const std::set<IndexPair>&,
                                 const std::set<IndexPair>&)>(
            &set_f1<IndexPair>),
        py::arg("predicted"), py::arg("gold"));
  m.def(
      "macro_f1_matching",
      [](const std::vector<int>& predicted, const std::vector<int>& gold) {
        MatchingScore s = macro_f1_matching(predicted, gold);
        return py::make_tuple(s.f_sm, s.per_class_f1);
      },
      py::arg("predicted"), py::arg("gold"));
  m.def("fsi_score", &fsi_score, py::arg("predicted"), py::arg("gold"));
  m.def("final_score", &final_score, py::arg("f_sm"), py::arg("f_fsi"),
        py::arg("f_fsa"));

  py::class_<SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init<>())
      .def_readwrite("n_pairs", &SyntheticSpec::n_pairs)
      .def_readwrite("min_sentences", &SyntheticSpec::min_sentences)
      .def_readwrite("max_sentences", &SyntheticSpec::max_sentences)
      .def_readwrite("feature_rate", &SyntheticSpec::feature_rate)
      .def_readwrite("fool_rate", &SyntheticSpec::fool_rate)
      .def_readwrite("seed", &SyntheticSpec::seed);

  m.def("generate_corpus", &generate_corpus, py::arg("spec"));
}
