#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "casematch/cli.hpp"
#include "casematch/errors.hpp"

namespace {

using casematch::RunConfig;

RunConfig make_config(const std::string& config_path,
                      const std::vector<std::string>& overrides) {
  std::string text = "{}";
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      throw casematch::Error(casematch::ErrorKind::kConfig,
                             "cannot open config file: " + config_path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  for (const auto& assignment : overrides) {
    text = casematch::apply_config_override(text, assignment);
  }
  return casematch::run_config_from_json_text(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interpretable similar-case matching pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto add_config_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat JSON config file");
    cmd->add_option("--set", overrides,
                    "override a config key, e.g. --set seed=7");
  };

  // generate
  auto* generate = app.add_subcommand(
      "generate", "emit a synthetic annotated case-pair corpus");
  casematch::SyntheticSpec spec;
  std::string generate_out = "corpus.jsonl";
  int generate_k_folds = 5;
  generate->add_option("--out", generate_out, "output JSONL path");
  generate->add_option("--n-pairs", spec.n_pairs, "number of case pairs");
  generate->add_option("--seed", spec.seed, "generator seed");
  generate->add_option("--feature-rate", spec.feature_rate,
                       "feature sentences per case, as a rate");
  generate->add_option("--fool-rate", spec.fool_rate,
                       "fraction of not-match pairs styled like match pairs");
  generate->add_option("--min-sentences", spec.min_sentences,
                       "minimum sentences per case");
  generate->add_option("--max-sentences", spec.max_sentences,
                       "maximum sentences per case");
  generate->add_option("--k-folds", generate_k_folds,
                       "fold count the corpus must support");

  // prepare / train / predict / evaluate / report
  auto* prepare = app.add_subcommand(
      "prepare", "split folds and derive per-fold training files");
  add_config_options(prepare);

  auto* train = app.add_subcommand("train", "train module heads for a fold");
  add_config_options(train);
  int train_fold = -1;
  std::string train_module = "all";
  train->add_option("--fold", train_fold, "fold id (default: all folds)");
  train->add_option("--module", train_module, "fsi | matcher | aligner | all");

  auto* predict = app.add_subcommand(
      "predict", "run the pipeline over a fold's test pairs");
  add_config_options(predict);
  int predict_fold = -1;
  predict->add_option("--fold", predict_fold, "fold id (default: all folds)");

  auto* evaluate = app.add_subcommand(
      "evaluate", "score predictions against gold annotations");
  add_config_options(evaluate);
  int evaluate_fold = -1;
  std::string eval_pred, eval_gold, eval_out;
  evaluate->add_option("--fold", evaluate_fold, "fold id (default: all folds)");
  evaluate->add_option("--pred", eval_pred,
                       "prediction JSONL (file mode, with --gold)");
  evaluate->add_option("--gold", eval_gold, "gold corpus JSONL (file mode)");
  evaluate->add_option("--out", eval_out, "report path (file mode)");

  auto* report = app.add_subcommand(
      "report", "aggregate fold reports into one summary");
  add_config_options(report);
  bool report_pooled = false;
  report->add_flag("--pooled", report_pooled,
                   "also score all fold predictions pooled as one set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (generate->parsed()) {
      casematch::cmd_generate(spec, generate_out, generate_k_folds);
    } else if (prepare->parsed()) {
      casematch::cmd_prepare(make_config(config_path, overrides));
    } else if (train->parsed()) {
      casematch::cmd_train(make_config(config_path, overrides), train_fold,
                           train_module);
    } else if (predict->parsed()) {
      casematch::cmd_predict(make_config(config_path, overrides),
                             predict_fold);
    } else if (evaluate->parsed()) {
      if (!eval_pred.empty() || !eval_gold.empty()) {
        if (eval_pred.empty() || eval_gold.empty()) {
          throw casematch::Error(casematch::ErrorKind::kConfig,
                                 "file mode needs both --pred and --gold");
        }
        casematch::cmd_evaluate_files(eval_pred, eval_gold, eval_out);
      } else {
        casematch::cmd_evaluate(make_config(config_path, overrides),
                                evaluate_fold);
      }
    } else if (report->parsed()) {
      casematch::cmd_report(make_config(config_path, overrides),
                            report_pooled);
    }
  } catch (const casematch::Error& e) {
    std::cerr << "error (" << e.kind_name() << "): " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
