#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "stocklab/envs.hpp"
#include "stocklab/ingest.hpp"
#include "stocklab/rng.hpp"

namespace stocklab {

struct AgentConfig {
    std::size_t state_size = 3;
    std::size_t action_size = 3;
    std::size_t memory_capacity = 5000;
    double gamma = 0.9;
    double epsilon_start = 1.0;
    double epsilon_min = 0.01;
    double epsilon_decay = 0.995;
    double learning_rate = 0.001;
    std::vector<std::size_t> hidden_sizes = {64, 64};
    double dropout_rate = 0.1;
    double grad_clip_norm = 1.0;
    std::size_t episodes = 100;
    std::size_t batch_size = 10;

    void validate() const;
};

/// Model-kind defaults; the multi-echelon preset uses 128-unit hidden
/// layers and a 0.95 discount.
AgentConfig default_agent_config(ModelKind kind);

/// Tuned preset: epsilon_decay 0.885, learning_rate 0.005, hidden sizes
/// (64,128) for lost-sales/dual-sourcing or (128,128) for multi-echelon,
/// dropout 0.3. Everything else matches the defaults.
AgentConfig tuned_agent_config(ModelKind kind);

/// Fully-connected ReLU network, identity output.
struct Network {
    struct Layer {
        std::size_t in = 0;
        std::size_t out = 0;
        std::vector<double> weights;  // row-major, out x in
        std::vector<double> biases;
    };
    std::vector<Layer> layers;

    std::size_t input_size() const { return layers.front().in; }
    std::size_t output_size() const { return layers.back().out; }
    std::size_t parameter_count() const;
};

/// He-style uniform initialization scaled by fan-in, deterministic in seed.
Network build_network(const AgentConfig& config, std::uint64_t seed);

/// Q-values for one state. In training mode, inverted dropout is applied to
/// the hidden activations with masks drawn from rng.
std::vector<double> forward(const Network& net, const std::vector<double>& state,
                            bool training = false, double dropout_rate = 0.0, Rng* rng = nullptr);

/// Parameter-shaped gradient container.
struct Gradients {
    std::vector<Network::Layer> layers;
    double global_norm() const;
    void scale(double factor);
};

/// Mean squared error over the batch and action dimensions, plus its
/// gradient. Dropout masks (training mode) are drawn once per sample and
/// shared between the forward and backward passes.
double batch_loss_and_gradients(const Network& net,
                                const std::vector<std::vector<double>>& states,
                                const std::vector<std::vector<double>>& targets, bool training,
                                double dropout_rate, Rng* rng, Gradients* out);

class AdamOptimizer {
   public:
    AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                  double epsilon = 1e-8);
    void step(Network& net, const Gradients& grads);

   private:
    double learning_rate_, beta1_, beta2_, epsilon_;
    std::size_t t_ = 0;
    std::vector<std::vector<double>> m_w_, v_w_, m_b_, v_b_;
};

struct ReplayEntry {
    std::vector<double> state;
    std::size_t action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
};

struct TrainLog {
    std::vector<double> total_rewards;  // one per episode
    std::vector<double> epsilons;       // epsilon at episode end
};

class DqnAgent {
   public:
    DqnAgent(AgentConfig config, std::uint64_t seed);

    const AgentConfig& config() const { return config_; }
    const Network& network() const { return network_; }
    Network& network() { return network_; }
    double epsilon() const { return epsilon_; }
    void set_epsilon(double value) { epsilon_ = value; }

    /// Inference-mode Q-values.
    std::vector<double> q_values(const std::vector<double>& state) const;

    /// Epsilon-greedy with the supplied random source; greedy ties go to
    /// the lowest action index.
    std::size_t act(const std::vector<double>& state, Rng& rng);
    std::size_t act(const std::vector<double>& state) { return act(state, rng_); }

    /// FIFO buffer capped at memory_capacity.
    void remember(ReplayEntry entry);
    const std::deque<ReplayEntry>& memory() const { return memory_; }

    /// One optimization step on a uniform without-replacement batch.
    /// Requires memory size > batch_size. Returns the batch loss and then
    /// decays epsilon to max(epsilon_min, epsilon * epsilon_decay).
    double replay(std::size_t batch_size);
    double replay() { return replay(config_.batch_size); }

    // Introspection for diagnostics.
    struct ReplayRecord {
        ReplayEntry entry;
        std::vector<double> target;
    };
    const std::vector<ReplayRecord>& last_replay_batch() const { return last_batch_; }
    double last_gradient_norm_preclip() const { return last_norm_preclip_; }
    double last_gradient_norm_postclip() const { return last_norm_postclip_; }

   private:
    AgentConfig config_;
    Network network_;
    AdamOptimizer optimizer_;
    Rng rng_;
    double epsilon_;
    std::deque<ReplayEntry> memory_;
    std::vector<ReplayRecord> last_batch_;
    double last_norm_preclip_ = 0.0;
    double last_norm_postclip_ = 0.0;
};

/// Full training loop: per step act -> env.step -> remember -> replay
/// (once the buffer exceeds the batch size). One episode walks the whole
/// frame. Bit-deterministic in (env, config, seed).
TrainLog train_agent(DqnAgent& agent, InventoryEnv& env,
                     std::vector<TraceRow>* trace_out = nullptr);
TrainLog train(InventoryEnv& env, const AgentConfig& config, std::uint64_t seed,
               std::vector<TraceRow>* trace_out = nullptr);

/// Versioned JSON weight files (format_version 1).
void save_weights(const Network& net, const std::string& path);
Network load_weights(const std::string& path);

void write_train_log_csv(const TrainLog& log, const std::string& path);

}  // namespace stocklab
