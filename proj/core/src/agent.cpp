#include "nancy/agent.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace nancy::agent {

namespace {

Eigen::MatrixXd init_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = rng.next_in(-bound, bound);
    }
  }
  return m;
}

Net init_net(const LayerShapes& shapes, const std::vector<std::size_t>& head_sizes, Rng& rng) {
  Net net;
  std::size_t in = shapes.obs_dim;
  for (std::size_t h : shapes.hidden) {
    net.w.push_back(init_matrix(h, in, rng));
    net.b.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h)));
    in = h;
  }
  for (std::size_t hs : head_sizes) {
    net.head_w.push_back(init_matrix(hs, in, rng));
    net.head_b.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(hs)));
  }
  return net;
}

Eigen::VectorXd leaky(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return v > 0.0 ? v : kLeakySlope * v; });
}

Eigen::VectorXd leaky_grad(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : kLeakySlope; });
}

// Trunk forward; returns the final activation and fills the trace.
Eigen::VectorXd trunk_forward(const Net& net, const Eigen::VectorXd& obs, ForwardTrace* trace) {
  Eigen::VectorXd a = obs;
  if (trace) trace->input = obs;
  for (std::size_t l = 0; l < net.w.size(); ++l) {
    Eigen::VectorXd z = net.w[l] * a + net.b[l];
    a = leaky(z);
    if (trace) {
      trace->pre.push_back(std::move(z));
      trace->act.push_back(a);
    }
  }
  return a;
}

// Stable log-softmax.
Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return logits.array() - lse;
}

Net zero_like(const Net& net) {
  Net z;
  for (const auto& w : net.w) z.w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : net.b) z.b.push_back(Eigen::VectorXd::Zero(b.size()));
  for (const auto& w : net.head_w) z.head_w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : net.head_b) z.head_b.push_back(Eigen::VectorXd::Zero(b.size()));
  return z;
}

// Backpropagates per-head logit gradients through the trunk into grads.
void backprop(const Net& net, const ForwardTrace& trace,
              const std::vector<Eigen::VectorXd>& logit_grads, Net& grads) {
  const std::size_t layers = net.w.size();
  const Eigen::VectorXd& top = layers > 0 ? trace.act.back() : trace.input;

  Eigen::VectorXd da = Eigen::VectorXd::Zero(top.size());
  for (std::size_t h = 0; h < net.head_w.size(); ++h) {
    if (logit_grads[h].size() == 0) continue;
    grads.head_w[h].noalias() += logit_grads[h] * top.transpose();
    grads.head_b[h] += logit_grads[h];
    da.noalias() += net.head_w[h].transpose() * logit_grads[h];
  }
  for (std::size_t l = layers; l-- > 0;) {
    const Eigen::VectorXd dz = da.cwiseProduct(leaky_grad(trace.pre[l]));
    const Eigen::VectorXd& below = l > 0 ? trace.act[l - 1] : trace.input;
    grads.w[l].noalias() += dz * below.transpose();
    grads.b[l] += dz;
    da.noalias() = net.w[l].transpose() * dz;
  }
}

double squared_norm(const Net& net) {
  double n = 0.0;
  for (const auto& w : net.w) n += w.squaredNorm();
  for (const auto& b : net.b) n += b.squaredNorm();
  for (const auto& w : net.head_w) n += w.squaredNorm();
  for (const auto& b : net.head_b) n += b.squaredNorm();
  return n;
}

void scale(Net& net, double f) {
  for (auto& w : net.w) w *= f;
  for (auto& b : net.b) b *= f;
  for (auto& w : net.head_w) w *= f;
  for (auto& b : net.head_b) b *= f;
}

bool all_finite(const Net& net) {
  auto ok = [](const auto& m) { return m.allFinite(); };
  for (const auto& w : net.w) {
    if (!ok(w)) return false;
  }
  for (const auto& b : net.b) {
    if (!ok(b)) return false;
  }
  for (const auto& w : net.head_w) {
    if (!ok(w)) return false;
  }
  for (const auto& b : net.head_b) {
    if (!ok(b)) return false;
  }
  return true;
}

void axpy(Net& params, const Net& grads, double lr) {
  for (std::size_t i = 0; i < params.w.size(); ++i) params.w[i] += lr * grads.w[i];
  for (std::size_t i = 0; i < params.b.size(); ++i) params.b[i] += lr * grads.b[i];
  for (std::size_t i = 0; i < params.head_w.size(); ++i) params.head_w[i] += lr * grads.head_w[i];
  for (std::size_t i = 0; i < params.head_b.size(); ++i) params.head_b[i] += lr * grads.head_b[i];
}

void check_obs(const PolicyParams& params, const Eigen::VectorXd& obs) {
  if (static_cast<std::size_t>(obs.size()) != params.shapes.obs_dim) {
    throw ShapeMismatchError("agent: observation length != obs_dim");
  }
}

}  // namespace

PolicyParams init_params(const LayerShapes& shapes, std::uint64_t seed) {
  if (shapes.obs_dim == 0 || shapes.head_sizes.empty()) {
    throw ShapeMismatchError("agent: empty shape specification");
  }
  PolicyParams p;
  p.shapes = shapes;
  Rng actor_rng(mix_seed(seed, {0xAC7052ULL}));
  Rng critic_rng(mix_seed(seed, {0xC217C0ULL}));
  p.actor = init_net(shapes, shapes.head_sizes, actor_rng);
  p.critic = init_net(shapes, {1}, critic_rng);
  return p;
}

std::vector<Eigen::VectorXd> actor_forward(const PolicyParams& params,
                                           const Eigen::VectorXd& obs, ForwardTrace* trace) {
  check_obs(params, obs);
  ForwardTrace local;
  ForwardTrace* tr = trace ? trace : &local;
  const Eigen::VectorXd top = trunk_forward(params.actor, obs, tr);
  std::vector<Eigen::VectorXd> probs;
  probs.reserve(params.actor.head_w.size());
  for (std::size_t h = 0; h < params.actor.head_w.size(); ++h) {
    Eigen::VectorXd logits = params.actor.head_w[h] * top + params.actor.head_b[h];
    probs.push_back(log_softmax(logits).array().exp());
    tr->logits.push_back(std::move(logits));
  }
  return probs;
}

double critic_forward(const PolicyParams& params, const Eigen::VectorXd& obs,
                      ForwardTrace* trace) {
  check_obs(params, obs);
  ForwardTrace local;
  ForwardTrace* tr = trace ? trace : &local;
  const Eigen::VectorXd top = trunk_forward(params.critic, obs, tr);
  const Eigen::VectorXd out = params.critic.head_w[0] * top + params.critic.head_b[0];
  tr->logits.push_back(out);
  return out(0);
}

double joint_log_prob(const PolicyParams& params, const Eigen::VectorXd& obs,
                      const std::vector<std::size_t>& action) {
  ForwardTrace trace;
  actor_forward(params, obs, &trace);
  if (action.size() != trace.logits.size()) {
    throw ShapeMismatchError("agent: action arity != head count");
  }
  double lp = 0.0;
  for (std::size_t h = 0; h < action.size(); ++h) {
    lp += log_softmax(trace.logits[h])(static_cast<Eigen::Index>(action[h]));
  }
  return lp;
}

std::vector<std::size_t> act_greedy(const PolicyParams& params, const Eigen::VectorXd& obs) {
  const auto probs = actor_forward(params, obs);
  std::vector<std::size_t> out;
  out.reserve(probs.size());
  for (const auto& p : probs) {
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < p.size(); ++i) {
      if (p(i) > p(best)) best = static_cast<std::size_t>(i);
    }
    out.push_back(best);
  }
  return out;
}

std::vector<std::size_t> act_sample(const PolicyParams& params, const Eigen::VectorXd& obs,
                                    Rng& rng) {
  const auto probs = actor_forward(params, obs);
  std::vector<std::size_t> out;
  out.reserve(probs.size());
  for (const auto& p : probs) {
    const double u = rng.next_unit();
    double cum = 0.0;
    std::size_t pick = static_cast<std::size_t>(p.size()) - 1;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      cum += p(i);
      if (u < cum) {
        pick = static_cast<std::size_t>(i);
        break;
      }
    }
    out.push_back(pick);
  }
  return out;
}

std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma,
                                       double bootstrap) {
  std::vector<double> returns(rewards.size());
  double g = bootstrap;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    g = rewards[i] + gamma * g;
    returns[i] = g;
  }
  return returns;
}

Grads compute_gradients(const PolicyParams& params, const std::vector<Trajectory>& batch,
                        double entropy_weight, double gamma, unsigned parts,
                        UpdateMetrics* metrics) {
  Grads grads{zero_like(params.actor), zero_like(params.critic)};
  const std::size_t heads = params.shapes.head_sizes.size();

  UpdateMetrics local;
  local.mean_head_entropy.assign(heads, 0.0);

  for (const auto& traj : batch) {
    if (traj.empty()) continue;
    std::vector<double> rewards(traj.size());
    for (std::size_t t = 0; t < traj.size(); ++t) rewards[t] = traj[t].reward;
    // Complete episodes bootstrap zero past the terminal step.
    const auto returns = discounted_returns(rewards, gamma, 0.0);

    for (std::size_t t = 0; t < traj.size(); ++t) {
      const auto& step = traj[t];
      if (step.action.size() != heads) {
        throw ShapeMismatchError("agent: action arity != head count");
      }
      ForwardTrace ctrace;
      const double value = critic_forward(params, step.obs, &ctrace);
      const double advantage = returns[t] - value;

      ForwardTrace atrace;
      actor_forward(params, step.obs, &atrace);

      std::vector<Eigen::VectorXd> logit_grads(heads);
      for (std::size_t h = 0; h < heads; ++h) {
        const Eigen::VectorXd logp = log_softmax(atrace.logits[h]);
        const Eigen::VectorXd p = logp.array().exp();
        double entropy = 0.0;
        for (Eigen::Index i = 0; i < p.size(); ++i) {
          if (p(i) > 0.0) entropy -= p(i) * logp(i);
        }
        local.mean_head_entropy[h] += entropy;

        Eigen::VectorXd g = Eigen::VectorXd::Zero(p.size());
        if (parts & kPolicyGrad) {
          g -= advantage * p;
          g(static_cast<Eigen::Index>(step.action[h])) += advantage;
          local.actor_objective += logp(static_cast<Eigen::Index>(step.action[h])) * advantage;
        }
        if (parts & kEntropyGrad) {
          // d H / d logits = -p .* (log p + H)
          for (Eigen::Index i = 0; i < p.size(); ++i) {
            if (p(i) > 0.0) g(i) -= entropy_weight * p(i) * (logp(i) + entropy);
          }
        }
        logit_grads[h] = std::move(g);
      }
      backprop(params.actor, atrace, logit_grads, grads.actor);

      if (parts & kCriticGrad) {
        // ascent on -1/2 (G - V)^2: dV coefficient is (G - V)
        std::vector<Eigen::VectorXd> vgrad(1);
        vgrad[0] = Eigen::VectorXd::Constant(1, advantage);
        backprop(params.critic, ctrace, vgrad, grads.critic);
      }
      local.critic_loss += 0.5 * advantage * advantage;
      local.mean_advantage += advantage;
      ++local.steps;
    }
  }

  if (local.steps > 0) {
    const double inv = 1.0 / static_cast<double>(local.steps);
    local.mean_advantage *= inv;
    for (auto& e : local.mean_head_entropy) e *= inv;
  }
  local.actor_grad_norm = std::sqrt(squared_norm(grads.actor));
  local.critic_grad_norm = std::sqrt(squared_norm(grads.critic));
  if (metrics) *metrics = local;
  return grads;
}

UpdateMetrics update(PolicyParams& params, const std::vector<Trajectory>& batch,
                     const TrainConfig& cfg, double entropy_weight) {
  if (batch.empty()) throw ShapeMismatchError("agent: empty batch");
  UpdateMetrics metrics;
  Grads grads = compute_gradients(params, batch, entropy_weight, cfg.gamma, kAllGrads, &metrics);

  if (!all_finite(grads.actor) || !all_finite(grads.critic) ||
      !std::isfinite(metrics.actor_objective) || !std::isfinite(metrics.critic_loss)) {
    throw NonFiniteGradientError();
  }
  if (cfg.grad_clip > 0.0) {
    if (metrics.actor_grad_norm > cfg.grad_clip) {
      scale(grads.actor, cfg.grad_clip / metrics.actor_grad_norm);
    }
    if (metrics.critic_grad_norm > cfg.grad_clip) {
      scale(grads.critic, cfg.grad_clip / metrics.critic_grad_norm);
    }
  }
  axpy(params.actor, grads.actor, cfg.learning_rate);
  axpy(params.critic, grads.critic, cfg.learning_rate);
  return metrics;
}

std::vector<double> flatten(const Net& net) {
  std::vector<double> out;
  auto push = [&](const auto& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(m(r, c));
    }
  };
  for (const auto& w : net.w) push(w);
  for (const auto& b : net.b) push(b);
  for (const auto& w : net.head_w) push(w);
  for (const auto& b : net.head_b) push(b);
  return out;
}

void unflatten(Net& net, const std::vector<double>& values) {
  std::size_t i = 0;
  auto pull = [&](auto& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = values.at(i++);
    }
  };
  for (auto& w : net.w) pull(w);
  for (auto& b : net.b) pull(b);
  for (auto& w : net.head_w) pull(w);
  for (auto& b : net.head_b) pull(b);
  if (i != values.size()) throw ShapeMismatchError("agent: flat parameter size mismatch");
}

namespace {

void write_matrix(std::FILE* f, const char* name, const Eigen::MatrixXd& m) {
  std::fprintf(f, "%s %ld %ld\n", name, static_cast<long>(m.rows()), static_cast<long>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::fprintf(f, c + 1 == m.cols() ? "%.17g\n" : "%.17g ", m(r, c));
    }
  }
}

void write_net(std::FILE* f, const char* prefix, const Net& net) {
  char name[64];
  for (std::size_t l = 0; l < net.w.size(); ++l) {
    std::snprintf(name, sizeof(name), "%s_w%zu", prefix, l);
    write_matrix(f, name, net.w[l]);
    std::snprintf(name, sizeof(name), "%s_b%zu", prefix, l);
    write_matrix(f, name, net.b[l]);
  }
  for (std::size_t h = 0; h < net.head_w.size(); ++h) {
    std::snprintf(name, sizeof(name), "%s_head_w%zu", prefix, h);
    write_matrix(f, name, net.head_w[h]);
    std::snprintf(name, sizeof(name), "%s_head_b%zu", prefix, h);
    write_matrix(f, name, net.head_b[h]);
  }
}

Eigen::MatrixXd read_matrix(std::istream& in, const std::string& expect_name) {
  std::string name;
  long rows = 0, cols = 0;
  if (!(in >> name >> rows >> cols) || name != expect_name) {
    throw CheckpointError("checkpoint: expected section " + expect_name);
  }
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (!(in >> m(r, c))) throw CheckpointError("checkpoint: truncated " + expect_name);
    }
  }
  return m;
}

Net read_net(std::istream& in, const char* prefix, std::size_t layers, std::size_t heads) {
  Net net;
  char name[64];
  for (std::size_t l = 0; l < layers; ++l) {
    std::snprintf(name, sizeof(name), "%s_w%zu", prefix, l);
    net.w.push_back(read_matrix(in, name));
    std::snprintf(name, sizeof(name), "%s_b%zu", prefix, l);
    net.b.push_back(read_matrix(in, name).col(0));
  }
  for (std::size_t h = 0; h < heads; ++h) {
    std::snprintf(name, sizeof(name), "%s_head_w%zu", prefix, h);
    net.head_w.push_back(read_matrix(in, name));
    std::snprintf(name, sizeof(name), "%s_head_b%zu", prefix, h);
    net.head_b.push_back(read_matrix(in, name).col(0));
  }
  return net;
}

}  // namespace

void save_checkpoint(const PolicyParams& params, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw CheckpointError("checkpoint: cannot write " + path.string());
  std::fprintf(f, "nancy-policy v1\n");
  std::fprintf(f, "obs_dim %zu\n", params.shapes.obs_dim);
  std::fprintf(f, "hidden");
  for (std::size_t h : params.shapes.hidden) std::fprintf(f, " %zu", h);
  std::fprintf(f, "\nheads");
  for (std::size_t h : params.shapes.head_sizes) std::fprintf(f, " %zu", h);
  std::fprintf(f, "\n");
  write_net(f, "actor", params.actor);
  write_net(f, "critic", params.critic);
  std::fclose(f);
}

PolicyParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path.string());
  std::string magic, version;
  in >> magic >> version;
  if (magic != "nancy-policy" || version != "v1") {
    throw CheckpointError("checkpoint: unrecognized header in " + path.string());
  }
  PolicyParams p;
  std::string key;
  in >> key >> p.shapes.obs_dim;
  if (key != "obs_dim") throw CheckpointError("checkpoint: missing obs_dim");

  std::string line;
  std::getline(in, line);  // rest of obs_dim line
  std::getline(in, line);
  {
    std::istringstream ls(line);
    ls >> key;
    if (key != "hidden") throw CheckpointError("checkpoint: missing hidden sizes");
    p.shapes.hidden.clear();
    std::size_t v = 0;
    while (ls >> v) p.shapes.hidden.push_back(v);
  }
  std::getline(in, line);
  {
    std::istringstream ls(line);
    ls >> key;
    if (key != "heads") throw CheckpointError("checkpoint: missing head sizes");
    std::size_t v = 0;
    while (ls >> v) p.shapes.head_sizes.push_back(v);
  }
  p.actor = read_net(in, "actor", p.shapes.hidden.size(), p.shapes.head_sizes.size());
  p.critic = read_net(in, "critic", p.shapes.hidden.size(), 1);
  return p;
}

}  // namespace nancy::agent
