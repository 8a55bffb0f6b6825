// Command-line front end for the scenario-reduction toolkit: synthetic corpus
// generation, reduction with any method, surrogate training, evaluation, and
// side-by-side benchmarking.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scenred/scenred.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int thread_budget() {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* env = std::getenv("SCENRED_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) threads = std::min(requested, 256);
  }
  return std::min(threads, 256);
}

void emit_json(const json& j, const std::string& report_path) {
  std::cout << j.dump(2) << "\n";
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
    if (!out) scenred::fail(scenred::ErrorKind::Io, "cannot open '" + report_path + "' for writing");
    out << j.dump(2) << "\n";
  }
}

std::string numbered_csv_path(const std::string& directory, int index) {
  char name[32];
  std::snprintf(name, sizeof name, "set_%04d.csv", index);
  return (fs::path(directory) / name).string();
}

struct GenArgs {
  std::string out;
  int count = 1;
  int scenarios = 64;
  scenred::SolarGenConfig solar{};
};

int run_gen(const GenArgs& args) {
  const bool single_file = args.count == 1 && args.out.size() > 4 &&
                           args.out.substr(args.out.size() - 4) == ".csv";
  if (!single_file) fs::create_directories(args.out);
  for (int i = 0; i < args.count; ++i) {
    scenred::SolarGenConfig cfg = args.solar;
    cfg.seed = args.solar.seed + static_cast<std::uint64_t>(i);
    const scenred::ScenarioSet set = scenred::gen_synthetic(cfg, args.scenarios);
    const std::string path = single_file ? args.out : numbered_csv_path(args.out, i);
    scenred::save_csv(set, path);
  }
  std::cout << "wrote " << args.count << " scenario set" << (args.count == 1 ? "" : "s") << " to "
            << args.out << "\n";
  return 0;
}

struct ReduceArgs {
  std::string in;
  std::string out;
  std::string method = "ffs";
  std::string model_path;
  std::string report_path;
  scenred::ReductionConfig cfg{};
};

int run_reduce(const ReduceArgs& args) {
  const scenred::ScenarioSet set = scenred::load_csv(args.in);
  std::optional<scenred::DcnnModel> model;
  scenred::ReductionConfig cfg = args.cfg;
  if (args.method == "dcnn") {
    model = scenred::load_model(args.model_path);
    cfg.target_size = model->reduced_size();
  }
  const scenred::ReductionReport report =
      scenred::run_reduction_report(set, args.method, cfg, model ? &*model : nullptr);
  // Re-run the reduction outside the timed call to obtain the set to write.
  const scenred::ScenarioSet reduced = args.method == "dcnn"
                                           ? scenred::forward_reduce(*model, set).reduced
                                           : scenred::reduce_with_method(set, args.method, cfg);
  scenred::save_csv(reduced, args.out);
  emit_json(scenred::to_json(report), args.report_path);
  return 0;
}

struct TrainArgs {
  std::string corpus_dir;
  std::string model_path;
  std::string loss_csv_path;
  std::string report_path;
  int target_size = 0;
  int filter_width = 3;
  int epochs = 10000;
  double train_fraction = 0.82;
  double lambda_moment = 1.0;
  std::uint64_t seed = 0;
};

void write_loss_csv(const scenred::TrainReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) scenred::fail(scenred::ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << "epoch,train_loss,test_loss\n";
  for (std::size_t e = 0; e < report.train_loss.size(); ++e) {
    out << (e + 1) << "," << scenred::detail::format_double(report.train_loss[e]) << ",";
    if (e < report.test_loss.size()) out << scenred::detail::format_double(report.test_loss[e]);
    out << "\n";
  }
}

/// Teacher outputs are cached next to each corpus file with a .target.csv
/// suffix; a cache whose dimensions do not match the requested reduction is
/// recomputed and overwritten.
std::vector<scenred::ScenarioSet> teacher_targets(const std::vector<std::string>& files,
                                                  const std::vector<scenred::ScenarioSet>& sets,
                                                  const scenred::ReductionConfig& cfg, int threads) {
  std::vector<std::optional<scenred::ScenarioSet>> targets(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string cache = scenred::teacher_cache_path(files[i]);
    if (!fs::exists(cache)) continue;
    scenred::ScenarioSet cached = scenred::load_csv(cache);
    if (cached.size() == cfg.target_size && cached.horizon() == sets[i].horizon())
      targets[i] = std::move(cached);
  }
  const int workers = std::min<int>(threads, static_cast<int>(files.size()));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int k = 0; k < workers; ++k) {
    pool.emplace_back([&, k]() {
      for (std::size_t i = static_cast<std::size_t>(k); i < files.size();
           i += static_cast<std::size_t>(workers)) {
        if (targets[i]) continue;
        targets[i] = scenred::heuristic_search_reduce(sets[i], cfg);
      }
    });
  }
  for (std::thread& t : pool) t.join();

  std::vector<scenred::ScenarioSet> result;
  result.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string cache = scenred::teacher_cache_path(files[i]);
    if (!fs::exists(cache)) scenred::save_csv(*targets[i], cache);
    result.push_back(std::move(*targets[i]));
  }
  return result;
}

int run_train(const TrainArgs& args) {
  const std::vector<std::string> files = scenred::list_corpus_files(args.corpus_dir);
  std::vector<scenred::ScenarioSet> sets;
  sets.reserve(files.size());
  for (const std::string& file : files) sets.push_back(scenred::load_csv(file));
  for (const scenred::ScenarioSet& set : sets) {
    if (set.size() != sets.front().size() || set.horizon() != sets.front().horizon())
      scenred::fail(scenred::ErrorKind::InconsistentCorpus,
                    "corpus files disagree on scenario count or horizon");
  }
  const int set_size = sets.front().size();
  const int horizon = sets.front().horizon();

  scenred::ReductionConfig cfg;
  cfg.target_size = args.target_size;
  cfg.lambda_moment = args.lambda_moment;
  cfg.seed = args.seed;

  scenred::DcnnModel model =
      scenred::build_model(horizon, set_size, args.target_size, args.filter_width, args.seed);
  model.normalization = scenred::value_range(std::span<const scenred::ScenarioSet>(sets));

  const int threads = thread_budget();
  const std::vector<scenred::ScenarioSet> teachers = teacher_targets(files, sets, cfg, threads);

  const auto [train_idx, test_idx] =
      scenred::split_indices(static_cast<int>(sets.size()), args.train_fraction, args.seed);
  if (train_idx.empty())
    scenred::fail(scenred::ErrorKind::InvalidArgument, "train split is empty; corpus is too small");

  std::vector<scenred::TrainingPair> train_pairs;
  std::vector<scenred::TrainingPair> test_pairs;
  train_pairs.reserve(train_idx.size());
  test_pairs.reserve(test_idx.size());
  for (int i : train_idx)
    train_pairs.push_back(scenred::make_training_pair_from_teacher(
        sets[static_cast<std::size_t>(i)], teachers[static_cast<std::size_t>(i)], model.normalization));
  for (int i : test_idx)
    test_pairs.push_back(scenred::make_training_pair_from_teacher(
        sets[static_cast<std::size_t>(i)], teachers[static_cast<std::size_t>(i)], model.normalization));

  scenred::TrainOptions opts;
  opts.epochs = args.epochs;
  opts.seed = args.seed;
  opts.threads = threads;
  const scenred::TrainReport report = scenred::train(model, train_pairs, test_pairs, opts);

  scenred::save_model(model, args.model_path);
  const std::string loss_path =
      args.loss_csv_path.empty() ? args.model_path + ".loss.csv" : args.loss_csv_path;
  write_loss_csv(report, loss_path);
  emit_json(scenred::to_json(report, static_cast<int>(train_pairs.size()),
                             static_cast<int>(test_pairs.size())),
            args.report_path);
  return 0;
}

struct EvalArgs {
  std::string in;
  std::string reduced_path;
  std::string model_path;
  std::string report_path;
  double lambda_moment = 1.0;
};

int run_eval(const EvalArgs& args) {
  const scenred::ScenarioSet original = scenred::load_csv(args.in);
  std::optional<scenred::ScenarioSet> reduced;
  if (!args.reduced_path.empty()) {
    reduced = scenred::load_csv(args.reduced_path);
  } else {
    scenred::DcnnModel model = scenred::load_model(args.model_path);
    reduced = scenred::forward_reduce(model, original).reduced;
  }
  const scenred::DistanceReport report =
      scenred::combined_objective(original, *reduced, args.lambda_moment);
  emit_json(scenred::to_json(report), args.report_path);
  return 0;
}

struct BenchArgs {
  std::string in;
  std::string model_path;
  std::string methods = "hs,dcnn";
  std::string report_path;
  double lambda_moment = 1.0;
  std::uint64_t seed = 0;
};

std::vector<std::string> split_methods(const std::string& spec) {
  std::vector<std::string> methods;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string item =
        spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) methods.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (methods.empty())
    scenred::fail(scenred::ErrorKind::UnknownMethod, "no benchmark methods requested");
  for (const std::string& m : methods) {
    if (m != "ffs" && m != "sbr" && m != "kmeans" && m != "hs" && m != "dcnn")
      scenred::fail(scenred::ErrorKind::UnknownMethod, "unknown benchmark method '" + m + "'");
  }
  return methods;
}

int run_bench(const BenchArgs& args) {
  const scenred::ScenarioSet set = scenred::load_csv(args.in);
  scenred::DcnnModel model = scenred::load_model(args.model_path);

  scenred::ReductionConfig cfg;
  cfg.target_size = model.reduced_size();
  cfg.lambda_moment = args.lambda_moment;
  cfg.seed = args.seed;

  const std::vector<std::string> methods = split_methods(args.methods);
  std::vector<scenred::ReductionReport> reports;
  reports.reserve(methods.size());
  for (const std::string& method : methods)
    reports.push_back(scenred::run_reduction_report(set, method, cfg, &model));

  // Three-row table: time, space distance, moment distance per method.
  std::printf("%-18s", "metric");
  for (const auto& r : reports) std::printf("  %14s", r.method.c_str());
  std::printf("\n");
  std::printf("%-18s", "time_s");
  for (const auto& r : reports) std::printf("  %14.6g", r.time_ms / 1e3);
  std::printf("\n");
  std::printf("%-18s", "space_distance");
  for (const auto& r : reports) std::printf("  %14.6g", r.space_distance);
  std::printf("\n");
  std::printf("%-18s", "moment_distance");
  for (const auto& r : reports) std::printf("  %14.6g", r.moment_distance);
  std::printf("\n");

  json j;
  j["reports"] = json::array();
  for (const auto& r : reports) j["reports"].push_back(scenred::to_json(r));

  const auto find_time = [&](const std::string& name) -> std::optional<double> {
    for (const auto& r : reports)
      if (r.method == name) return r.time_ms;
    return std::nullopt;
  };
  const auto hs_time = find_time("hs");
  const auto dcnn_time = find_time("dcnn");
  if (hs_time && dcnn_time) {
    const double speedup = *hs_time / *dcnn_time;
    std::printf("speedup hs/dcnn: %.1fx\n", speedup);
    j["speedup_hs_over_dcnn"] = speedup;
  }
  if (!args.report_path.empty()) {
    std::ofstream out(args.report_path, std::ios::binary | std::ios::trunc);
    if (!out)
      scenred::fail(scenred::ErrorKind::Io, "cannot open '" + args.report_path + "' for writing");
    out << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario reduction toolkit: classic reducers and a convolutional surrogate"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic solar scenario corpus");
  gen->add_option("--out", gen_args.out, "Output directory (or single .csv path when --count 1)")
      ->required();
  gen->add_option("--count", gen_args.count, "Number of scenario-set files")->check(CLI::PositiveNumber);
  gen->add_option("--scenarios", gen_args.scenarios, "Scenarios per set")->check(CLI::PositiveNumber);
  gen->add_option("--horizon", gen_args.solar.horizon, "Time steps per scenario");
  gen->add_option("--seed", gen_args.solar.seed, "Base seed; file i uses seed+i");
  gen->add_option("--peak-kw", gen_args.solar.peak_kw, "Clear-sky peak output");
  gen->add_option("--sunrise", gen_args.solar.sunrise, "First daylight step");
  gen->add_option("--sunset", gen_args.solar.sunset, "First dark step after daylight");
  gen->add_option("--jitter", gen_args.solar.amplitude_jitter, "Amplitude jitter fraction");
  gen->add_option("--min-dips", gen_args.solar.min_cloud_dips, "Minimum cloud dips per scenario");
  gen->add_option("--max-dips", gen_args.solar.max_cloud_dips, "Maximum cloud dips per scenario");
  gen->add_option("--dip-depth-min", gen_args.solar.dip_depth_min, "Shallowest cloud dip");
  gen->add_option("--dip-depth-max", gen_args.solar.dip_depth_max, "Deepest cloud dip");

  ReduceArgs reduce_args;
  CLI::App* reduce = app.add_subcommand("reduce", "Reduce one scenario set");
  reduce->add_option("--in", reduce_args.in, "Input scenario CSV")->required();
  reduce->add_option("--out", reduce_args.out, "Output CSV for the reduced set")->required();
  reduce->add_option("--method", reduce_args.method, "Reduction method")
      ->check(CLI::IsMember({"ffs", "sbr", "kmeans", "hs", "dcnn"}))
      ->required();
  reduce->add_option("--target-size", reduce_args.cfg.target_size,
                     "Scenarios to keep (ignored for dcnn; the model fixes it)");
  reduce->add_option("--lambda-moment", reduce_args.cfg.lambda_moment, "Moment weight for hs");
  reduce->add_option("--seed", reduce_args.cfg.seed, "Seed for seeded methods");
  reduce->add_option("--max-hs-passes", reduce_args.cfg.max_hs_passes, "Swap-pass cap for hs");
  reduce->add_option("--kmeans-max-iters", reduce_args.cfg.kmeans_max_iters, "Iteration cap for kmeans");
  reduce->add_option("--model", reduce_args.model_path, "Checkpoint path (required for dcnn)");
  reduce->add_option("--report", reduce_args.report_path, "Also write the JSON report here");

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Train the surrogate on a corpus directory");
  train->add_option("--corpus", train_args.corpus_dir, "Directory of scenario CSV files")->required();
  train->add_option("--model", train_args.model_path, "Output checkpoint path")->required();
  train->add_option("--target-size", train_args.target_size, "Scenarios to keep")
      ->check(CLI::PositiveNumber)
      ->required();
  train->add_option("--filter-width", train_args.filter_width, "Convolution filter width (odd)");
  train->add_option("--epochs", train_args.epochs, "Training epochs")->check(CLI::PositiveNumber);
  train->add_option("--train-fraction", train_args.train_fraction, "Fraction of the corpus to train on");
  train->add_option("--lambda-moment", train_args.lambda_moment, "Moment weight for the hs teacher");
  train->add_option("--seed", train_args.seed, "Seed for init, split, and reports");
  train->add_option("--loss-csv", train_args.loss_csv_path,
                    "Loss curve CSV path (default: <model>.loss.csv)");
  train->add_option("--report", train_args.report_path, "Also write the JSON training report here");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Distance report between a set and a reduction");
  eval->add_option("--in", eval_args.in, "Original scenario CSV")->required();
  eval->add_option("--reduced", eval_args.reduced_path, "Reduced scenario CSV to evaluate");
  eval->add_option("--model", eval_args.model_path, "Checkpoint; evaluates its output on --in");
  eval->add_option("--lambda-moment", eval_args.lambda_moment, "Moment weight in the combined value");
  eval->add_option("--report", eval_args.report_path, "Also write the JSON report here");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Time several methods on one input");
  bench->add_option("--in", bench_args.in, "Input scenario CSV")->required();
  bench->add_option("--model", bench_args.model_path, "Checkpoint for the dcnn column")->required();
  bench->add_option("--methods", bench_args.methods, "Comma list from ffs,sbr,kmeans,hs,dcnn");
  bench->add_option("--lambda-moment", bench_args.lambda_moment, "Moment weight for hs");
  bench->add_option("--seed", bench_args.seed, "Seed recorded in the reports");
  bench->add_option("--report", bench_args.report_path, "Write the JSON benchmark here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (reduce->parsed()) {
      if (reduce_args.method == "dcnn" && reduce_args.model_path.empty()) {
        std::cerr << "reduce: --model is required when --method dcnn\n";
        return 1;
      }
      if (reduce_args.method != "dcnn" && reduce_args.cfg.target_size < 1) {
        std::cerr << "reduce: --target-size is required for method '" << reduce_args.method << "'\n";
        return 1;
      }
      return run_reduce(reduce_args);
    }
    if (train->parsed()) return run_train(train_args);
    if (eval->parsed()) {
      if (eval_args.reduced_path.empty() == eval_args.model_path.empty()) {
        std::cerr << "eval: provide exactly one of --reduced or --model\n";
        return 1;
      }
      return run_eval(eval_args);
    }
    if (bench->parsed()) return run_bench(bench_args);
  } catch (const scenred::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return scenred::exit_category(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
