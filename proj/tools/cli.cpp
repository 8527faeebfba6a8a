#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "subsetforge/dataset.hpp"
#include "subsetforge/report.hpp"
#include "subsetforge/synthgen.hpp"

namespace subsetforge::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::uint64_t seed = 42;
  int budget = 0;  // 0: per-subcommand default (sweep 15, wrapper 30)
  double test_fraction = 0.3;
  int threads = 0;
  std::string out = ".";
  bool enforce_exclusion = false;
  int folds = 5;
  int sbel_folds = 5;
  std::string input;       // dataset CSV
  std::string gen_config;  // generator config JSON
  std::size_t n_rows = 2438;
};

int usage_error(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << content;
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
  std::fprintf(stderr, "wrote %s\n", path.string().c_str());
}

GeneratorConfig resolve_generator_config(const Options& opt) {
  if (!opt.gen_config.empty()) return generator_config_from_json(read_file(opt.gen_config));
  GeneratorConfig config = default_generator_config(opt.seed);
  config.n_rows = opt.n_rows;
  return config;
}

Dataset load_input(const Options& opt) {
  Dataset data = opt.input.empty() ? generate(resolve_generator_config(opt))
                                   : load_csv(opt.input, canonical_schema());
  for (const std::string& w : data.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return data;
}

// Shared front half of the sweep and wrapper pipelines: load, optionally
// apply the exclusion rules, split, and standardize on train statistics.
SplitPair prepare_split(const Options& opt) {
  Dataset data = load_input(opt);
  if (opt.enforce_exclusion) {
    ValidationReport report = validate(data);
    if (!report.ok()) {
      std::fprintf(stderr, "excluding %zu flagged rows\n", report.flagged_rows().size());
      data = drop_flagged(data, report);
    }
  }
  SplitPair split = stratified_split(data, opt.test_fraction, derive_seed(opt.seed, "split"));
  StandardizeResult standardized = standardize(split.train, split.test);
  return SplitPair{std::move(standardized.train), std::move(standardized.test),
                   split.test_fraction, split.seed};
}

std::string kind_file_tag(LearnerKind kind) {
  std::string tag = kind_name(kind);
  for (char& c : tag) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return tag;
}

const char* column_kind_name(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Continuous: return "continuous";
    case ColumnKind::Binary: return "binary";
    case ColumnKind::Ordinal: return "ordinal";
  }
  return "?";
}

std::string long_name_of(const std::string& machine_name) {
  for (const auto& [long_form, machine] : column_name_aliases())
    if (machine == machine_name && long_form != machine_name) return long_form;
  return "";
}

int run_schema() {
  const FeatureSchema& schema = canonical_schema();
  std::printf("name,role,kind,lo,hi,long_name\n");
  for (const ColumnSpec& col : schema.columns)
    std::printf("%s,feature,%s,%g,%g,%s\n", col.name.c_str(), column_kind_name(col.kind),
                col.lo, col.hi, long_name_of(col.name).c_str());
  const ColumnSpec& target = schema.target;
  std::printf("%s,target,%s,%g,%g,%s\n", target.name.c_str(), column_kind_name(target.kind),
              target.lo, target.hi, long_name_of(target.name).c_str());
  return 0;
}

int run_gen(const Options& opt) {
  GeneratorConfig config = resolve_generator_config(opt);
  Dataset data = generate(config);
  fs::create_directories(opt.out);
  fs::path csv_path = fs::path(opt.out) / "synthetic.csv";
  save_csv(data, csv_path.string());
  std::fprintf(stderr, "wrote %s\n", csv_path.string().c_str());
  write_file(fs::path(opt.out) / "generator_config.json", to_json(config));
  return 0;
}

int run_rank(const Options& opt) {
  Dataset data = load_input(opt);
  RankedFeatures ranked = rank_features(data, RankOrder::Descending);
  for (const std::string& w : ranked.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  fs::create_directories(opt.out);
  write_file(fs::path(opt.out) / "ranking.csv", emit_ranking_series(ranked).to_csv());
  return 0;
}

int run_sweep(const Options& opt, const std::string& order) {
  SplitPair split = prepare_split(opt);
  RankedFeatures ranked = rank_features(
      split.train, order == "asc" ? RankOrder::Ascending : RankOrder::Descending);
  for (const std::string& w : ranked.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  SweepConfig config;
  config.budget = opt.budget > 0 ? opt.budget : 15;
  config.cv_folds = opt.folds;
  config.sbel_folds = opt.sbel_folds;
  std::vector<SweepRow> rows = filter_sweep(split, ranked, all_learner_kinds(), config,
                                            derive_seed(opt.seed, "sweep"));
  FigureSeries fig = emit_sweep_series(rows);
  fig.name = "sweep_" + order;
  fs::create_directories(opt.out);
  write_file(fs::path(opt.out) / (fig.name + ".csv"), fig.to_csv());
  return 0;
}

int run_wrapper(const Options& opt, const WrapperMethod& method,
                const std::vector<LearnerKind>& kinds) {
  SplitPair split = prepare_split(opt);
  ProtocolConfig config;
  config.budget = opt.budget > 0 ? opt.budget : 30;
  config.cv_folds = opt.folds;
  config.sbel_folds = opt.sbel_folds;
  fs::create_directories(opt.out);
  std::vector<ProtocolReport> reports;
  reports.reserve(kinds.size());
  for (LearnerKind kind : kinds) {
    ProtocolReport report = run_wrapper_protocol(
        kind, split, method, config, derive_seed(opt.seed, "wrapper_" + kind_name(kind)));
    write_file(fs::path(opt.out) / ("report_" + kind_file_tag(kind) + ".json"),
               to_json(report));
    reports.push_back(std::move(report));
  }
  if (reports.size() == all_learner_kinds().size()) {
    ReportTable table = emit_wrapper_table(reports);
    write_file(fs::path(opt.out) / "wrapper_table.md", table.to_markdown());
    write_file(fs::path(opt.out) / "wrapper_table.csv", table.to_csv());
  }
  return 0;
}

int run_report(const Options& opt, const std::vector<std::string>& paths) {
  std::vector<ProtocolReport> reports;
  reports.reserve(paths.size());
  for (const std::string& path : paths)
    reports.push_back(protocol_report_from_json(read_file(path)));
  ReportTable table = emit_wrapper_table(reports);
  std::string markdown = table.to_markdown();
  std::fputs(markdown.c_str(), stdout);
  fs::create_directories(opt.out);
  write_file(fs::path(opt.out) / "wrapper_table.md", markdown);
  write_file(fs::path(opt.out) / "wrapper_table.csv", table.to_csv());
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"subsetforge: feature selection and classifier evaluation for platform-failure data"};
  app.require_subcommand(1);
  app.fallthrough();  // let global flags appear after the subcommand name

  Options opt;
  app.add_option("--seed", opt.seed, "master seed for every derived random stream")
      ->capture_default_str();
  auto* budget_opt =
      app.add_option("--budget", opt.budget,
                     "randomized-search budget (default: 15 for sweep, 30 for wrapper)");
  app.add_option("--test-fraction", opt.test_fraction, "held-out fraction for the split")
      ->capture_default_str();
  auto* threads_opt = app.add_option(
      "--threads", opt.threads, "worker threads (default: SUBSETFORGE_THREADS or hardware)");
  app.add_option("--out", opt.out, "output directory")->capture_default_str();
  app.add_flag("--enforce-exclusion", opt.enforce_exclusion,
               "validate and drop rows violating the exclusion rules");
  app.add_option("--folds", opt.folds, "cross-validation fold count")->capture_default_str();
  app.add_option("--sbel-folds", opt.sbel_folds, "stacking out-of-fold split count")
      ->capture_default_str();
  auto* input_opt = app.add_option("--input", opt.input, "dataset CSV path");
  auto* config_opt =
      app.add_option("--gen-config", opt.gen_config, "generator config JSON path");
  auto* n_opt =
      app.add_option("--n", opt.n_rows, "synthetic row count when generating the input")
          ->capture_default_str();
  input_opt->excludes(config_opt);
  config_opt->excludes(input_opt);
  n_opt->excludes(config_opt);
  n_opt->excludes(input_opt);

  auto* schema_cmd = app.add_subcommand("schema", "print the canonical column schema as CSV");
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic dataset CSV");
  auto* rank_cmd =
      app.add_subcommand("rank", "rank features by |Spearman| correlation with the target");

  auto* sweep_cmd = app.add_subcommand("sweep", "filter-method prefix sweep over all models");
  std::string order = "desc";
  sweep_cmd->add_option("--order", order, "prefix direction")
      ->check(CLI::IsMember({"desc", "asc"}))
      ->capture_default_str();

  auto* wrapper_cmd =
      app.add_subcommand("wrapper", "wrapper-method selection protocol per model");
  std::string method_name;
  wrapper_cmd->add_option("--method", method_name, "selection method")
      ->required()
      ->check(CLI::IsMember({"forward", "backward", "fixed"}));
  double tol = 0.0;
  auto* tol_opt = wrapper_cmd->add_option(
      "--tol", tol, "stopping tolerance (default: 0.001 forward, -0.003 backward)");
  int k = 5;
  auto* k_opt =
      wrapper_cmd->add_option("--k", k, "subset size for --method fixed")->capture_default_str();
  std::string model = "all";
  wrapper_cmd->add_option("--model", model, "LR|SVM|RF|ANN|XGBoost|SBEL|all")
      ->capture_default_str();

  auto* report_cmd =
      app.add_subcommand("report", "render a model-comparison table from protocol reports");
  std::vector<std::string> report_paths;
  report_cmd->add_option("paths", report_paths, "protocol report JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message; exit status is ours
    return 1;
  }

  if (!(opt.test_fraction > 0.0 && opt.test_fraction < 1.0))
    return usage_error("--test-fraction must be strictly between 0 and 1");
  if (budget_opt->count() && opt.budget < 1) return usage_error("--budget must be at least 1");
  if (opt.folds < 2) return usage_error("--folds must be at least 2");
  if (opt.sbel_folds < 2) return usage_error("--sbel-folds must be at least 2");
  if (opt.n_rows < 1) return usage_error("--n must be at least 1");
  if (threads_opt->count()) {
    if (opt.threads < 1) return usage_error("--threads must be at least 1");
    set_max_threads(opt.threads);
  }

  try {
    if (app.got_subcommand(schema_cmd)) return run_schema();
    if (app.got_subcommand(gen_cmd)) return run_gen(opt);
    if (app.got_subcommand(rank_cmd)) return run_rank(opt);
    if (app.got_subcommand(sweep_cmd)) return run_sweep(opt, order);
    if (app.got_subcommand(wrapper_cmd)) {
      WrapperMethod method = WrapperMethod::forward(0.001);
      if (method_name == "fixed") {
        if (tol_opt->count()) return usage_error("--tol applies only to forward/backward");
        if (k < 1) return usage_error("--k must be at least 1");
        method = WrapperMethod::fixed_k(k);
      } else {
        if (k_opt->count()) return usage_error("--k applies only to --method fixed");
        double resolved = tol_opt->count() ? tol : (method_name == "forward" ? 0.001 : -0.003);
        if (method_name == "forward") {
          if (!(resolved > 0.0)) return usage_error("forward tolerance must be positive");
          method = WrapperMethod::forward(resolved);
        } else {
          if (!(resolved < 0.0)) return usage_error("backward tolerance must be negative");
          method = WrapperMethod::backward(resolved);
        }
      }
      std::vector<LearnerKind> kinds;
      if (model == "all") {
        kinds = all_learner_kinds();
      } else {
        try {
          kinds.push_back(kind_from_name(model));
        } catch (const Error&) {
          return usage_error("unknown model '" + model + "'");
        }
      }
      return run_wrapper(opt, method, kinds);
    }
    if (app.got_subcommand(report_cmd)) return run_report(opt, report_paths);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}

}  // namespace subsetforge::cli
