#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "scenred/adadelta.hpp"
#include "scenred/error.hpp"
#include "scenred/nn_layers.hpp"
#include "scenred/reducers.hpp"
#include "scenred/rng.hpp"
#include "scenred/scenario_set.hpp"
#include "scenred/tensor.hpp"

namespace scenred {

inline constexpr int kConvFilters = 64;
inline constexpr int kDenseHidden1 = 32;
inline constexpr int kDenseHidden2 = 8;
inline constexpr const char* kCanonicalOrderTag = "energy-asc-v1";

/// The reduction network: one full-height convolution, one width pooling
/// stage that shrinks S columns to the target count, and a position-wise
/// dense stack 64 -> 32 -> 8 -> 1 ending in a sigmoid. A model is bound to
/// its (horizon, set size, reduced size) triple; the reduced size must divide
/// the set size because pooling is the only width change.
class DcnnModel {
 public:
  DcnnModel(int horizon, int set_size, int reduced_size, int filter_width)
      : horizon_(horizon),
        set_size_(set_size),
        reduced_size_(reduced_size),
        filter_width_(filter_width),
        conv_(check_dims(horizon, set_size, reduced_size) + 1, filter_width, 1, kConvFilters),
        pool_(set_size / reduced_size),
        fc1_(kConvFilters, kDenseHidden1),
        fc2_(kDenseHidden1, kDenseHidden2),
        fc3_(kDenseHidden2, 1) {
    conv_.compute_input_grad = false;  // first layer; nothing upstream needs it
  }

  void init_weights(Rng& rng) {
    conv_.init_weights(rng);
    fc1_.init_weights(rng);
    fc2_.init_weights(rng);
    fc3_.init_weights(rng);
  }

  /// (T+1) x S x 1 in, (T+1) x reduced x 1 out.
  const nn::Tensor3& forward(const nn::Tensor3& input) {
    if (input.height != horizon_ + 1 || input.width != set_size_ || input.channels != 1)
      fail(ErrorKind::ShapeMismatch,
           "model expects input " + std::to_string(horizon_ + 1) + "x" + std::to_string(set_size_) +
               "x1, got " + input.shape_string());
    const nn::Tensor3& a1 = act_conv_.forward(conv_.forward(input));
    const nn::Tensor3& a2 = act_pool_.forward(pool_.forward(a1));
    const nn::Tensor3& a3 = act_fc1_.forward(fc1_.forward(a2));
    const nn::Tensor3& a4 = act_fc2_.forward(fc2_.forward(a3));
    return act_out_.forward(fc3_.forward(a4));
  }

  /// Accumulates parameter gradients for the most recent forward pass.
  void backward(const nn::Tensor3& d_prediction) {
    const nn::Tensor3& g5 = fc3_.backward(act_out_.backward(d_prediction));
    const nn::Tensor3& g4 = fc2_.backward(act_fc2_.backward(g5));
    const nn::Tensor3& g3 = fc1_.backward(act_fc1_.backward(g4));
    const nn::Tensor3& g2 = pool_.backward(act_pool_.backward(g3));
    conv_.backward(act_conv_.backward(g2));
  }

  void zero_grad() {
    for (nn::LayerParams* p : parameter_sets()) p->zero_grad();
  }

  void optimizer_step(const nn::AdaDeltaConfig& cfg) {
    for (nn::LayerParams* p : parameter_sets()) nn::adadelta_step(*p, cfg);
  }

  std::vector<nn::LayerParams*> parameter_sets() {
    return {&conv_.params(), &fc1_.params(), &fc2_.params(), &fc3_.params()};
  }

  std::vector<const nn::LayerParams*> parameter_sets() const {
    return {&conv_.params(), &fc1_.params(), &fc2_.params(), &fc3_.params()};
  }

  /// Copies weights and biases (not gradients or optimizer state) from a
  /// model with identical architecture.
  void copy_parameters_from(const DcnnModel& other) {
    const auto src = other.parameter_sets();
    const auto dst = parameter_sets();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      if (dst[i]->weights.size() != src[i]->weights.size() ||
          dst[i]->biases.size() != src[i]->biases.size())
        fail(ErrorKind::ShapeMismatch, "cannot copy parameters between different architectures");
      dst[i]->weights = src[i]->weights;
      dst[i]->biases = src[i]->biases;
    }
  }

  /// Activation shape after each of the five stages.
  std::vector<std::array<int, 3>> layer_output_shapes() const {
    return {{horizon_ + 1, set_size_, kConvFilters},
            {horizon_ + 1, reduced_size_, kConvFilters},
            {horizon_ + 1, reduced_size_, kDenseHidden1},
            {horizon_ + 1, reduced_size_, kDenseHidden2},
            {horizon_ + 1, reduced_size_, 1}};
  }

  int horizon() const { return horizon_; }
  int set_size() const { return set_size_; }
  int reduced_size() const { return reduced_size_; }
  int filter_width() const { return filter_width_; }
  int pool_width() const { return set_size_ / reduced_size_; }

  NormalizationParams normalization{};
  std::string canonical_tag = kCanonicalOrderTag;

 private:
  static int check_dims(int horizon, int set_size, int reduced_size) {
    if (horizon < 1 || set_size < 1 || reduced_size < 1)
      fail(ErrorKind::InvalidArgument, "model dimensions must be positive");
    if (set_size % reduced_size != 0)
      fail(ErrorKind::SizeNotFactor, "reduced size " + std::to_string(reduced_size) +
                                         " must be a factor of set size " + std::to_string(set_size));
    return horizon;
  }

  int horizon_, set_size_, reduced_size_, filter_width_;
  nn::ConvLayer conv_;
  nn::AvgPoolLayer pool_;
  nn::DenseLayer fc1_, fc2_, fc3_;
  nn::ReluLayer act_conv_, act_pool_, act_fc1_, act_fc2_;
  nn::SigmoidLayer act_out_;
};

inline DcnnModel build_model(int horizon, int set_size, int reduced_size, int filter_width,
                             std::uint64_t seed) {
  DcnnModel model(horizon, set_size, reduced_size, filter_width);
  Rng rng(seed);
  model.init_weights(rng);
  return model;
}

inline nn::Tensor3 grid_to_tensor(const ImageGrid& grid) {
  nn::Tensor3 tensor(grid.rows, grid.cols, 1);
  std::copy(grid.data.begin(), grid.data.end(), tensor.data.begin());
  return tensor;
}

inline ImageGrid tensor_to_grid(const nn::Tensor3& tensor) {
  if (tensor.channels != 1)
    fail(ErrorKind::ShapeMismatch, "only single-channel tensors convert to grids");
  ImageGrid grid(tensor.height, tensor.width);
  std::copy(tensor.data.begin(), tensor.data.end(), grid.data.begin());
  return grid;
}

/// One supervised example: the canonically ordered, normalized input image
/// and the teacher's reduced image in the same encoding.
struct TrainingPair {
  ImageGrid input;
  ImageGrid target;
};

inline TrainingPair make_training_pair_from_teacher(const ScenarioSet& set,
                                                    const ScenarioSet& teacher,
                                                    const NormalizationParams& norm) {
  return {encode_image(canonical_order(apply_normalization(set, norm))),
          encode_image(canonical_order(apply_normalization(teacher, norm)))};
}

/// Runs the heuristic-search teacher on the raw set and packages both sides
/// normalized and canonically ordered.
inline TrainingPair make_training_pair(const ScenarioSet& set, const ReductionConfig& cfg,
                                       const NormalizationParams& norm) {
  if (set.size() % cfg.target_size != 0)
    fail(ErrorKind::SizeNotFactor, "target size " + std::to_string(cfg.target_size) +
                                       " must be a factor of set size " + std::to_string(set.size()));
  return make_training_pair_from_teacher(set, heuristic_search_reduce(set, cfg), norm);
}

struct TrainOptions {
  int epochs = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  nn::AdaDeltaConfig optimizer{};
};

struct TrainReport {
  std::vector<double> train_loss;
  std::vector<double> test_loss;  // empty when no test pairs were supplied
  int epochs_run = 0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

/// Full-batch training: every epoch accumulates the mean-BCE gradient over
/// all training pairs, then takes one AdaDelta step. Losses are recorded with
/// the parameters the epoch started from. Pairs may be processed by several
/// worker threads; chunks are fixed by (pair order, thread count) and partial
/// results are reduced in thread order, so a given thread count always
/// reproduces the same arithmetic.
inline TrainReport train(DcnnModel& model, const std::vector<TrainingPair>& train_pairs,
                         const std::vector<TrainingPair>& test_pairs, const TrainOptions& opts) {
  if (opts.epochs < 1) fail(ErrorKind::InvalidArgument, "epochs must be at least 1");
  if (train_pairs.empty()) fail(ErrorKind::InvalidArgument, "training requires at least one pair");

  const int in_rows = model.horizon() + 1;
  const auto to_tensors = [&](const std::vector<TrainingPair>& pairs, std::vector<nn::Tensor3>& ins,
                              std::vector<nn::Tensor3>& tgts) {
    ins.reserve(pairs.size());
    tgts.reserve(pairs.size());
    for (const TrainingPair& pair : pairs) {
      if (pair.input.rows != in_rows || pair.input.cols != model.set_size())
        fail(ErrorKind::ShapeMismatch, "training input grid does not match the model");
      if (pair.target.rows != in_rows || pair.target.cols != model.reduced_size())
        fail(ErrorKind::ShapeMismatch, "training target grid does not match the model");
      ins.push_back(grid_to_tensor(pair.input));
      tgts.push_back(grid_to_tensor(pair.target));
    }
  };
  std::vector<nn::Tensor3> inputs, targets, test_inputs, test_targets;
  to_tensors(train_pairs, inputs, targets);
  to_tensors(test_pairs, test_inputs, test_targets);

  const int n_train = static_cast<int>(train_pairs.size());
  const int n_test = static_cast<int>(test_pairs.size());
  const int n_workers = std::clamp(opts.threads, 1, n_train);

  std::vector<DcnnModel> workers(static_cast<std::size_t>(n_workers), model);
  std::vector<nn::Tensor3> grad_buffers(static_cast<std::size_t>(n_workers));
  std::vector<double> train_partial(static_cast<std::size_t>(n_workers), 0.0);
  std::vector<double> test_partial(static_cast<std::size_t>(n_workers), 0.0);

  const auto chunk = [](int total, int parts, int k) {
    const int lo = static_cast<int>(static_cast<long long>(total) * k / parts);
    const int hi = static_cast<int>(static_cast<long long>(total) * (k + 1) / parts);
    return std::pair<int, int>{lo, hi};
  };

  TrainReport report;
  report.seed = opts.seed;
  report.train_loss.reserve(static_cast<std::size_t>(opts.epochs));
  if (n_test > 0) report.test_loss.reserve(static_cast<std::size_t>(opts.epochs));

  const auto t_start = std::chrono::steady_clock::now();
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    for (int k = 0; k < n_workers; ++k) {
      workers[static_cast<std::size_t>(k)].copy_parameters_from(model);
      workers[static_cast<std::size_t>(k)].zero_grad();
      train_partial[static_cast<std::size_t>(k)] = 0.0;
      test_partial[static_cast<std::size_t>(k)] = 0.0;
    }

    const auto run_worker = [&](int k) {
      DcnnModel& worker = workers[static_cast<std::size_t>(k)];
      nn::Tensor3& grad = grad_buffers[static_cast<std::size_t>(k)];
      const auto [lo, hi] = chunk(n_train, n_workers, k);
      for (int i = lo; i < hi; ++i) {
        const nn::Tensor3& pred = worker.forward(inputs[static_cast<std::size_t>(i)]);
        train_partial[static_cast<std::size_t>(k)] +=
            nn::bce_loss(pred, targets[static_cast<std::size_t>(i)], &grad);
        worker.backward(grad);
      }
      const auto [tlo, thi] = chunk(n_test, n_workers, k);
      for (int i = tlo; i < thi; ++i) {
        const nn::Tensor3& pred = worker.forward(test_inputs[static_cast<std::size_t>(i)]);
        test_partial[static_cast<std::size_t>(k)] +=
            nn::bce_loss(pred, test_targets[static_cast<std::size_t>(i)], nullptr);
      }
    };

    if (n_workers == 1) {
      run_worker(0);
    } else {
      std::vector<std::thread> threads;
      threads.reserve(static_cast<std::size_t>(n_workers - 1));
      for (int k = 1; k < n_workers; ++k) threads.emplace_back(run_worker, k);
      run_worker(0);
      for (std::thread& t : threads) t.join();
    }

    model.zero_grad();
    const auto master_params = model.parameter_sets();
    const double inv_n = 1.0 / static_cast<double>(n_train);
    for (int k = 0; k < n_workers; ++k) {
      const auto worker_params = workers[static_cast<std::size_t>(k)].parameter_sets();
      for (std::size_t l = 0; l < master_params.size(); ++l) {
        for (std::size_t i = 0; i < master_params[l]->grad_w.size(); ++i)
          master_params[l]->grad_w[i] += worker_params[l]->grad_w[i];
        for (std::size_t i = 0; i < master_params[l]->grad_b.size(); ++i)
          master_params[l]->grad_b[i] += worker_params[l]->grad_b[i];
      }
    }
    for (nn::LayerParams* p : master_params) {
      for (double& g : p->grad_w) g *= inv_n;
      for (double& g : p->grad_b) g *= inv_n;
      p->has_gradient = true;
    }

    double epoch_train = 0.0;
    double epoch_test = 0.0;
    for (int k = 0; k < n_workers; ++k) {
      epoch_train += train_partial[static_cast<std::size_t>(k)];
      epoch_test += test_partial[static_cast<std::size_t>(k)];
    }
    epoch_train /= n_train;
    if (n_test > 0) epoch_test /= n_test;

    if (!std::isfinite(epoch_train) || (n_test > 0 && !std::isfinite(epoch_test)))
      fail(ErrorKind::NonFiniteLoss, "loss diverged at epoch " + std::to_string(epoch + 1));

    report.train_loss.push_back(epoch_train);
    if (n_test > 0) report.test_loss.push_back(epoch_test);

    model.optimizer_step(opts.optimizer);
  }
  report.epochs_run = opts.epochs;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

struct ReduceResult {
  ScenarioSet reduced;
  double elapsed_seconds = 0.0;
};

/// One inference pass: normalize and canonically order the input, encode,
/// run the network, decode, denormalize. The clock covers the forward pass
/// and post-processing only.
inline ReduceResult forward_reduce(DcnnModel& model, const ScenarioSet& set) {
  if (set.horizon() != model.horizon() || set.size() != model.set_size())
    fail(ErrorKind::ShapeMismatch,
         "set is " + std::to_string(set.size()) + "x" + std::to_string(set.horizon()) +
             ", model is bound to " + std::to_string(model.set_size()) + "x" +
             std::to_string(model.horizon()));
  const nn::Tensor3 input =
      grid_to_tensor(encode_image(canonical_order(apply_normalization(set, model.normalization))));
  const auto t0 = std::chrono::steady_clock::now();
  const nn::Tensor3& prediction = model.forward(input);
  ScenarioSet reduced = denormalize(decode_image(tensor_to_grid(prediction)), model.normalization);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(reduced), elapsed};
}

}  // namespace scenred
