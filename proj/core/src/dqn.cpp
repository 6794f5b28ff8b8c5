#include "stocklab/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "stocklab/csv.hpp"
#include "stocklab/errors.hpp"

namespace stocklab {

void AgentConfig::validate() const {
    if (state_size == 0 || action_size == 0) throw std::invalid_argument("zero-width layer");
    for (std::size_t h : hidden_sizes)
        if (h == 0) throw std::invalid_argument("zero-width layer");
    if (!(epsilon_min > 0.0 && epsilon_min <= epsilon_start && epsilon_start <= 1.0))
        throw std::invalid_argument("need 0 < epsilon_min <= epsilon_start <= 1");
    if (!(epsilon_decay > 0.0 && epsilon_decay < 1.0))
        throw std::invalid_argument("epsilon_decay must be in (0,1)");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0,1]");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw std::invalid_argument("dropout_rate must be in [0,1)");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
}

AgentConfig default_agent_config(ModelKind kind) {
    AgentConfig config;
    config.state_size = kind == ModelKind::lost_sales ? 3 : 5;
    config.action_size = kind == ModelKind::lost_sales ? 3 : 4;
    if (kind == ModelKind::multi_echelon) {
        config.gamma = 0.95;
        config.hidden_sizes = {128, 128};
    }
    return config;
}

AgentConfig tuned_agent_config(ModelKind kind) {
    AgentConfig config = default_agent_config(kind);
    config.epsilon_decay = 0.885;
    config.learning_rate = 0.005;
    config.hidden_sizes =
        kind == ModelKind::multi_echelon ? std::vector<std::size_t>{128, 128}
                                         : std::vector<std::size_t>{64, 128};
    config.dropout_rate = 0.3;
    return config;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.in * layer.out + layer.out;
    return n;
}

Network build_network(const AgentConfig& config, std::uint64_t seed) {
    config.validate();
    std::vector<std::size_t> widths;
    widths.push_back(config.state_size);
    for (std::size_t h : config.hidden_sizes) widths.push_back(h);
    widths.push_back(config.action_size);

    Network net;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        Network::Layer layer;
        layer.in = widths[l];
        layer.out = widths[l + 1];
        layer.weights.resize(layer.in * layer.out);
        layer.biases.assign(layer.out, 0.0);
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.in));
        for (double& w : layer.weights) w = rng.uniform(-limit, limit);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace {

struct ForwardPass {
    // Per layer: pre-activation z, post-activation (after relu+dropout) a.
    std::vector<std::vector<double>> z;
    std::vector<std::vector<double>> a;      // a[0] is the input
    std::vector<std::vector<double>> masks;  // dropout masks per hidden layer
};

ForwardPass run_forward(const Network& net, const std::vector<double>& state, bool training,
                        double dropout_rate, Rng* rng) {
    if (state.size() != net.input_size())
        throw std::invalid_argument("state size mismatch: expected " +
                                    std::to_string(net.input_size()));
    ForwardPass pass;
    pass.a.push_back(state);
    const double keep = 1.0 - dropout_rate;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        std::vector<double> z(layer.out, 0.0);
        const auto& input = pass.a.back();
        for (std::size_t o = 0; o < layer.out; ++o) {
            double sum = layer.biases[o];
            const double* w = layer.weights.data() + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) sum += w[i] * input[i];
            z[o] = sum;
        }
        const bool hidden = l + 1 < net.layers.size();
        std::vector<double> a = z;
        std::vector<double> mask;
        if (hidden) {
            for (double& v : a) v = v > 0.0 ? v : 0.0;
            if (training && dropout_rate > 0.0 && rng != nullptr) {
                mask.resize(a.size());
                for (std::size_t i = 0; i < a.size(); ++i) {
                    mask[i] = rng->uniform() < dropout_rate ? 0.0 : 1.0 / keep;
                    a[i] *= mask[i];
                }
            }
        }
        pass.z.push_back(std::move(z));
        pass.masks.push_back(std::move(mask));
        pass.a.push_back(std::move(a));
    }
    return pass;
}

}  // namespace

std::vector<double> forward(const Network& net, const std::vector<double>& state, bool training,
                            double dropout_rate, Rng* rng) {
    return run_forward(net, state, training, dropout_rate, rng).a.back();
}

double Gradients::global_norm() const {
    double ss = 0.0;
    for (const auto& layer : layers) {
        for (double g : layer.weights) ss += g * g;
        for (double g : layer.biases) ss += g * g;
    }
    return std::sqrt(ss);
}

void Gradients::scale(double factor) {
    for (auto& layer : layers) {
        for (double& g : layer.weights) g *= factor;
        for (double& g : layer.biases) g *= factor;
    }
}

double batch_loss_and_gradients(const Network& net,
                                const std::vector<std::vector<double>>& states,
                                const std::vector<std::vector<double>>& targets, bool training,
                                double dropout_rate, Rng* rng, Gradients* out) {
    if (states.size() != targets.size() || states.empty())
        throw std::invalid_argument("states/targets must be nonempty and aligned");

    if (out != nullptr) {
        out->layers.clear();
        for (const auto& layer : net.layers) {
            Network::Layer g;
            g.in = layer.in;
            g.out = layer.out;
            g.weights.assign(layer.weights.size(), 0.0);
            g.biases.assign(layer.biases.size(), 0.0);
            out->layers.push_back(std::move(g));
        }
    }

    const double denom =
        static_cast<double>(states.size()) * static_cast<double>(net.output_size());
    double loss = 0.0;
    for (std::size_t s = 0; s < states.size(); ++s) {
        const ForwardPass pass = run_forward(net, states[s], training, dropout_rate, rng);
        const auto& q = pass.a.back();
        std::vector<double> delta(q.size());
        for (std::size_t o = 0; o < q.size(); ++o) {
            const double diff = q[o] - targets[s][o];
            loss += diff * diff;
            delta[o] = 2.0 * diff / denom;
        }
        if (out == nullptr) continue;

        for (std::size_t l = net.layers.size(); l-- > 0;) {
            const auto& layer = net.layers[l];
            auto& grad = out->layers[l];
            const auto& input = pass.a[l];
            for (std::size_t o = 0; o < layer.out; ++o) {
                grad.biases[o] += delta[o];
                double* gw = grad.weights.data() + o * layer.in;
                for (std::size_t i = 0; i < layer.in; ++i) gw[i] += delta[o] * input[i];
            }
            if (l == 0) break;
            std::vector<double> prev(layer.in, 0.0);
            for (std::size_t o = 0; o < layer.out; ++o) {
                const double* w = layer.weights.data() + o * layer.in;
                for (std::size_t i = 0; i < layer.in; ++i) prev[i] += w[i] * delta[o];
            }
            // Through the previous hidden layer's dropout mask and ReLU gate.
            const auto& mask = pass.masks[l - 1];
            if (!mask.empty())
                for (std::size_t i = 0; i < prev.size(); ++i) prev[i] *= mask[i];
            const auto& z = pass.z[l - 1];
            for (std::size_t i = 0; i < prev.size(); ++i)
                if (z[i] <= 0.0) prev[i] = 0.0;
            delta = std::move(prev);
        }
    }
    return loss / denom;
}

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2, double epsilon)
    : learning_rate_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

void AdamOptimizer::step(Network& net, const Gradients& grads) {
    if (m_w_.empty()) {
        for (const auto& layer : net.layers) {
            m_w_.emplace_back(layer.weights.size(), 0.0);
            v_w_.emplace_back(layer.weights.size(), 0.0);
            m_b_.emplace_back(layer.biases.size(), 0.0);
            v_b_.emplace_back(layer.biases.size(), 0.0);
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& layer = net.layers[l];
        auto update = [&](std::vector<double>& params, const std::vector<double>& g,
                          std::vector<double>& m, std::vector<double>& v) {
            for (std::size_t i = 0; i < params.size(); ++i) {
                m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
                v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
                const double m_hat = m[i] / bc1;
                const double v_hat = v[i] / bc2;
                params[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
            }
        };
        update(layer.weights, grads.layers[l].weights, m_w_[l], v_w_[l]);
        update(layer.biases, grads.layers[l].biases, m_b_[l], v_b_[l]);
    }
}

DqnAgent::DqnAgent(AgentConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      network_(build_network(config_, Rng::derive_seed(seed, 0x1A17))),
      optimizer_(config_.learning_rate),
      rng_(Rng::derive_seed(seed, 0xAC7)),
      epsilon_(config_.epsilon_start) {}

std::vector<double> DqnAgent::q_values(const std::vector<double>& state) const {
    return forward(network_, state);
}

std::size_t DqnAgent::act(const std::vector<double>& state, Rng& rng) {
    if (rng.uniform() < epsilon_)
        return static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(config_.action_size) - 1));
    const auto q = q_values(state);
    std::size_t best = 0;
    for (std::size_t a = 1; a < q.size(); ++a)
        if (q[a] > q[best]) best = a;  // ties keep the lowest index
    return best;
}

void DqnAgent::remember(ReplayEntry entry) {
    memory_.push_back(std::move(entry));
    while (memory_.size() > config_.memory_capacity) memory_.pop_front();
}

double DqnAgent::replay(std::size_t batch_size) {
    if (memory_.size() <= batch_size)
        throw std::logic_error("replay needs buffer size > batch_size");

    // Uniform sample without replacement.
    std::vector<std::size_t> pool(memory_.size());
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < batch_size; ++i) {
        const std::size_t j = static_cast<std::size_t>(rng_.uniform_int(
            static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size()) - 1));
        std::swap(pool[i], pool[j]);
    }

    std::vector<std::vector<double>> states, targets;
    states.reserve(batch_size);
    targets.reserve(batch_size);
    last_batch_.clear();
    for (std::size_t i = 0; i < batch_size; ++i) {
        const ReplayEntry& entry = memory_[pool[i]];
        std::vector<double> target = forward(network_, entry.state);
        if (entry.done) {
            target[entry.action] = entry.reward;
        } else {
            const auto next_q = forward(network_, entry.next_state);
            const double best_next = *std::max_element(next_q.begin(), next_q.end());
            target[entry.action] = entry.reward + config_.gamma * best_next;
        }
        states.push_back(entry.state);
        targets.push_back(target);
        last_batch_.push_back({entry, std::move(target)});
    }

    Gradients grads;
    const double loss = batch_loss_and_gradients(network_, states, targets, true,
                                                 config_.dropout_rate, &rng_, &grads);
    last_norm_preclip_ = grads.global_norm();
    if (last_norm_preclip_ > config_.grad_clip_norm && last_norm_preclip_ > 0.0)
        grads.scale(config_.grad_clip_norm / last_norm_preclip_);
    last_norm_postclip_ = grads.global_norm();
    optimizer_.step(network_, grads);

    epsilon_ = std::max(config_.epsilon_min, epsilon_ * config_.epsilon_decay);
    return loss;
}

TrainLog train_agent(DqnAgent& agent, InventoryEnv& env, std::vector<TraceRow>* trace_out) {
    const AgentConfig& config = agent.config();
    if (env.action_count() != config.action_size)
        throw std::invalid_argument("environment action count does not match the agent config");
    if (env.observation_size() != config.state_size)
        throw std::invalid_argument("environment observation size does not match the agent config");

    TrainLog log;
    for (std::size_t episode = 0; episode < config.episodes; ++episode) {
        EnvObservation state = env.reset();
        double total_reward = 0.0;
        bool done = false;
        std::size_t step_index = 0;
        while (!done) {
            const std::size_t action = agent.act(state);
            const StepOutcome outcome = env.step(action);
            total_reward += outcome.reward;
            agent.remember({state, action, outcome.reward, outcome.observation, outcome.done});
            if (trace_out != nullptr && episode + 1 == config.episodes)
                trace_out->push_back(
                    {step_index, action, outcome.reward, outcome.info, outcome.observation});
            state = outcome.observation;
            done = outcome.done;
            if (agent.memory().size() > config.batch_size) agent.replay(config.batch_size);
            ++step_index;
        }
        log.total_rewards.push_back(total_reward);
        log.epsilons.push_back(agent.epsilon());
    }
    return log;
}

TrainLog train(InventoryEnv& env, const AgentConfig& config, std::uint64_t seed,
               std::vector<TraceRow>* trace_out) {
    DqnAgent agent(config, seed);
    return train_agent(agent, env, trace_out);
}

void save_weights(const Network& net, const std::string& path) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : net.layers)
        layers.push_back({{"in", layer.in},
                          {"out", layer.out},
                          {"weights", layer.weights},
                          {"biases", layer.biases}});
    nlohmann::json j = {{"format_version", 1}, {"layers", layers}};
    std::ofstream outfile(path, std::ios::binary);
    if (!outfile) throw DataError("cannot write weights file: " + path);
    outfile << j.dump(2) << '\n';
}

Network load_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open weights file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError(std::string("malformed weights file: ") + e.what());
    }
    if (!j.contains("format_version") || j.at("format_version").get<int>() != 1)
        throw DataError("unsupported weights file version");
    Network net;
    for (const auto& jl : j.at("layers")) {
        Network::Layer layer;
        layer.in = jl.at("in").get<std::size_t>();
        layer.out = jl.at("out").get<std::size_t>();
        layer.weights = jl.at("weights").get<std::vector<double>>();
        layer.biases = jl.at("biases").get<std::vector<double>>();
        if (layer.weights.size() != layer.in * layer.out || layer.biases.size() != layer.out)
            throw DataError("weights file shape mismatch");
        net.layers.push_back(std::move(layer));
    }
    if (net.layers.empty()) throw DataError("weights file has no layers");
    for (std::size_t l = 0; l + 1 < net.layers.size(); ++l)
        if (net.layers[l].out != net.layers[l + 1].in)
            throw DataError("weights file layer shapes are inconsistent");
    return net;
}

void write_train_log_csv(const TrainLog& log, const std::string& path) {
    CsvTable table;
    table.header = {"episode", "total_reward", "epsilon"};
    for (std::size_t i = 0; i < log.total_rewards.size(); ++i)
        table.rows.push_back({std::to_string(i), format_double(log.total_rewards[i]),
                              format_double(log.epsilons[i])});
    write_csv(path, table);
}

}  // namespace stocklab
