#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "nancy/rng.hpp"

// Actor-critic policy with a fully-connected trunk and one softmax head
// per action component.  The joint action probability is the product of
// the head probabilities; updates follow the entropy-regularized policy
// gradient with the advantage taken as a constant, while the critic
// regresses the discounted return at the same learning rate.
namespace nancy::agent {

struct ShapeMismatchError : std::invalid_argument {
  explicit ShapeMismatchError(const char* what) : std::invalid_argument(what) {}
};

struct NonFiniteGradientError : std::runtime_error {
  NonFiniteGradientError() : std::runtime_error("agent: non-finite gradient, update aborted") {}
};

struct CheckpointError : std::runtime_error {
  explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kLeakySlope = 0.01;

struct LayerShapes {
  std::size_t obs_dim = 0;
  std::vector<std::size_t> hidden = {128, 128};
  std::vector<std::size_t> head_sizes;  // |omega|, |K|, |rho| (single entry: omega only)
};

// An MLP trunk with linear output heads; the critic is the same shape
// with a single scalar head.
struct Net {
  std::vector<Eigen::MatrixXd> w;       // trunk layer weights
  std::vector<Eigen::VectorXd> b;
  std::vector<Eigen::MatrixXd> head_w;  // per-head output weights
  std::vector<Eigen::VectorXd> head_b;
};

struct PolicyParams {
  LayerShapes shapes;
  Net actor;
  Net critic;
};

PolicyParams init_params(const LayerShapes& shapes, std::uint64_t seed);

struct ForwardTrace {
  Eigen::VectorXd input;
  std::vector<Eigen::VectorXd> pre;     // trunk pre-activations
  std::vector<Eigen::VectorXd> act;     // trunk activations
  std::vector<Eigen::VectorXd> logits;  // per head
};

// Per-head categorical distributions for one observation; each vector
// sums to 1.  Throws ShapeMismatchError on a wrong input length.
std::vector<Eigen::VectorXd> actor_forward(const PolicyParams& params,
                                           const Eigen::VectorXd& obs,
                                           ForwardTrace* trace = nullptr);

// Scalar value estimate.
double critic_forward(const PolicyParams& params, const Eigen::VectorXd& obs,
                      ForwardTrace* trace = nullptr);

// log pi(a|s) summed over heads.
double joint_log_prob(const PolicyParams& params, const Eigen::VectorXd& obs,
                      const std::vector<std::size_t>& action);

// Argmax per head, ties toward the lower index.
std::vector<std::size_t> act_greedy(const PolicyParams& params, const Eigen::VectorXd& obs);

// Seeded categorical draw per head.
std::vector<std::size_t> act_sample(const PolicyParams& params, const Eigen::VectorXd& obs,
                                    Rng& rng);

struct TimeStep {
  Eigen::VectorXd obs;
  std::vector<std::size_t> action;
  double reward = 0.0;
  bool done = false;
};
using Trajectory = std::vector<TimeStep>;

struct TrainConfig {
  double learning_rate = 1e-4;  // alpha, shared by actor and critic
  double beta_start = 1.0;      // entropy weight, decayed linearly ...
  double beta_end = 0.1;        // ... to this over the epochs
  double gamma = 0.99;
  double grad_clip = 5.0;       // global-norm clip per network
  std::size_t workers = 8;
  std::size_t epochs = 500;
  std::uint64_t seed = 1;
  bool async = false;           // asynchronous parameter-server mode
  std::size_t val_interval = 10;
  std::size_t val_episodes = 5;

  double beta_at(std::size_t epoch) const {
    if (epochs <= 1) return beta_start;
    const double f = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
    return beta_start + (beta_end - beta_start) * f;
  }
};

// G_t = r_t + gamma * G_{t+1}, with G_T = bootstrap past the last step.
std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma,
                                       double bootstrap);

// Which terms of the objective to differentiate; tests isolate them.
enum GradParts : unsigned {
  kPolicyGrad = 1u,
  kEntropyGrad = 2u,
  kCriticGrad = 4u,
  kAllGrads = kPolicyGrad | kEntropyGrad | kCriticGrad,
};

struct Grads {
  Net actor;   // ascent direction for sum_t log pi * A + beta * H
  Net critic;  // ascent direction for -1/2 sum_t (G_t - V)^2
};

struct UpdateMetrics {
  double actor_objective = 0.0;  // sum_t log pi(a_t|s_t) * A_t
  double critic_loss = 0.0;      // 1/2 sum_t (G_t - V_t)^2
  double mean_advantage = 0.0;
  std::vector<double> mean_head_entropy;
  double actor_grad_norm = 0.0;  // pre-clip
  double critic_grad_norm = 0.0;
  std::size_t steps = 0;
};

Grads compute_gradients(const PolicyParams& params, const std::vector<Trajectory>& batch,
                        double entropy_weight, double gamma, unsigned parts = kAllGrads,
                        UpdateMetrics* metrics = nullptr);

// In-place gradient ascent step; both nets use the same rate.
// Throws NonFiniteGradientError before touching params if any gradient
// entry is non-finite.
UpdateMetrics update(PolicyParams& params, const std::vector<Trajectory>& batch,
                     const TrainConfig& cfg, double entropy_weight);

// Flat views for finite-difference checks and norm computations.
std::vector<double> flatten(const Net& net);
void unflatten(Net& net, const std::vector<double>& values);

// Versioned text checkpoint: shape header plus row-major weights printed
// with enough digits to round-trip exactly.
void save_checkpoint(const PolicyParams& params, const std::filesystem::path& path);
PolicyParams load_checkpoint(const std::filesystem::path& path);

}  // namespace nancy::agent
