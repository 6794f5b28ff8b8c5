#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "stocklab/dqn.hpp"
#include "stocklab/envs.hpp"
#include "stocklab/errors.hpp"
#include "stocklab/rng.hpp"

using namespace stocklab;

namespace {

AgentConfig small_config(std::size_t state = 3, std::size_t actions = 3) {
    AgentConfig config;
    config.state_size = state;
    config.action_size = actions;
    config.hidden_sizes = {4, 4};
    config.dropout_rate = 0.0;
    return config;
}

Frame tiny_env_frame(std::size_t n) {
    SynthConfig config;
    config.n_days = n;
    config.seed = 55;
    return clean(generate_synthetic(config));
}

}  // namespace

TEST_CASE("network parameter count follows the shape arithmetic") {
    AgentConfig config;
    config.state_size = 3;
    config.action_size = 3;
    config.hidden_sizes = {64, 64};
    const Network net = build_network(config, 1);
    // 3*64+64 + 64*64+64 + 64*3+3
    const std::size_t expected = 3 * 64 + 64 + 64 * 64 + 64 + 64 * 3 + 3;
    CHECK(expected == 4611);
    CHECK(net.parameter_count() == expected);

    const Network again = build_network(config, 1);
    for (std::size_t l = 0; l < net.layers.size(); ++l)
        CHECK(net.layers[l].weights == again.layers[l].weights);

    // Zero input with zero biases flows to a zero output through ReLU.
    const auto q = forward(net, {0.0, 0.0, 0.0});
    for (double v : q) CHECK(v == 0.0);

    AgentConfig bad = config;
    bad.hidden_sizes = {0};
    CHECK_THROWS_AS(build_network(bad, 1), std::invalid_argument);
}

TEST_CASE("forward pass matches a hand computation") {
    // 1-2-1 network: w1 = (2, -3), b1 = (0.5, 1), w2 = (1, 2), b2 = -0.25.
    Network net;
    net.layers.push_back({1, 2, {2.0, -3.0}, {0.5, 1.0}});
    net.layers.push_back({2, 1, {1.0, 2.0}, {-0.25}});

    // x = 0.5: z1 = (1.5, -0.5) -> relu (1.5, 0); out = 1.5*1 + 0*2 - 0.25 = 1.25.
    auto out = forward(net, {0.5});
    REQUIRE(out.size() == 1);
    CHECK(out[0] == doctest::Approx(1.25).epsilon(1e-12));

    // x = -1: z1 = (-1.5, 4) -> relu (0, 4); out = 0 + 8 - 0.25 = 7.75.
    out = forward(net, {-1.0});
    CHECK(out[0] == doctest::Approx(7.75).epsilon(1e-12));

    CHECK_THROWS_AS(forward(net, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("inference is deterministic and dropout-free") {
    const Network net = build_network(small_config(), 9);
    const std::vector<double> state{0.3, -0.7, 1.1};
    CHECK(forward(net, state) == forward(net, state));

    Rng rng(1);
    // Dropout rate 0 in training mode equals inference.
    CHECK(forward(net, state, true, 0.0, &rng) == forward(net, state));

    // Nonzero dropout changes the training-mode output.
    Rng rng2(1);
    const auto dropped = forward(net, state, true, 0.5, &rng2);
    CHECK(dropped != forward(net, state));
}

TEST_CASE("epsilon-greedy action selection") {
    SUBCASE("epsilon 1 explores uniformly") {
        DqnAgent agent(small_config(), 3);
        agent.set_epsilon(1.0);
        Rng rng(42);
        const int n = 10000;
        int counts[3] = {0, 0, 0};
        for (int i = 0; i < n; ++i) ++counts[agent.act({0.0, 0.0, 0.0}, rng)];
        // Multinomial oracle: p = 1/3, sd = sqrt(p(1-p)/n).
        const double p = 1.0 / 3.0;
        const double sd = std::sqrt(p * (1.0 - p) / n);
        for (int c : counts)
            CHECK(std::abs(static_cast<double>(c) / n - p) < 3.0 * sd);
    }

    SUBCASE("epsilon 0 takes the argmax, ties to the lowest index") {
        // Identity-free network: zero weights, biases define the Q-vector.
        AgentConfig config = small_config();
        DqnAgent agent(config, 3);
        auto& net = agent.network();
        for (auto& layer : net.layers) std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
        net.layers.back().biases = {1.0, 5.0, 2.0};
        agent.set_epsilon(0.0);
        Rng rng(1);
        CHECK(agent.act({0.0, 0.0, 0.0}, rng) == 1);

        net.layers.back().biases = {3.0, 1.0, 3.0};  // tie between 0 and 2
        CHECK(agent.act({0.0, 0.0, 0.0}, rng) == 0);
    }
}

TEST_CASE("replay memory is FIFO with a hard capacity") {
    AgentConfig config = small_config(1, 2);
    config.memory_capacity = 2;
    DqnAgent agent(config, 5);
    agent.remember({{1.0}, 0, 0.0, {1.0}, false});
    agent.remember({{2.0}, 0, 0.0, {2.0}, false});
    agent.remember({{3.0}, 0, 0.0, {3.0}, false});
    REQUIRE(agent.memory().size() == 2);
    CHECK(agent.memory()[0].state[0] == 2.0);
    CHECK(agent.memory()[1].state[0] == 3.0);
}

TEST_CASE("replay targets, epsilon decay and clipping") {
    AgentConfig config = small_config(2, 2);
    config.batch_size = 4;
    config.learning_rate = 0.01;
    DqnAgent agent(config, 17);

    Rng rng(3);
    for (int i = 0; i < 40; ++i) {
        const std::vector<double> s{rng.uniform(), rng.uniform()};
        const std::vector<double> next{rng.uniform(), rng.uniform()};
        agent.remember({s, static_cast<std::size_t>(i % 2), rng.uniform(-100.0, 100.0), next,
                        i % 3 == 0});
    }

    SUBCASE("terminal targets equal the reward exactly") {
        for (int round = 0; round < 10; ++round) {
            agent.replay(4);
            for (const auto& record : agent.last_replay_batch()) {
                if (record.entry.done)
                    CHECK(record.target[record.entry.action] == record.entry.reward);
            }
        }
    }

    SUBCASE("epsilon follows the closed-form decay recurrence") {
        double expected = config.epsilon_start;
        for (int k = 0; k < 30; ++k) {
            agent.replay(4);
            expected = std::max(config.epsilon_min, expected * config.epsilon_decay);
            CHECK(agent.epsilon() == expected);
        }
    }

    SUBCASE("post-clip gradient norm never exceeds the limit") {
        for (int round = 0; round < 20; ++round) {
            agent.replay(4);
            CHECK(agent.last_gradient_norm_postclip() <= config.grad_clip_norm + 1e-9);
            if (agent.last_gradient_norm_preclip() > config.grad_clip_norm)
                CHECK(agent.last_gradient_norm_postclip() ==
                      doctest::Approx(config.grad_clip_norm).epsilon(1e-12));
        }
    }

    SUBCASE("replay never mutates the stored entries") {
        const std::deque<ReplayEntry> before = agent.memory();
        for (int round = 0; round < 5; ++round) agent.replay(4);
        const std::deque<ReplayEntry>& after = agent.memory();
        REQUIRE(after.size() == before.size());
        for (std::size_t i = 0; i < before.size(); ++i) {
            CHECK(after[i].state == before[i].state);
            CHECK(after[i].action == before[i].action);
            CHECK(after[i].reward == before[i].reward);
            CHECK(after[i].next_state == before[i].next_state);
            CHECK(after[i].done == before[i].done);
        }
    }

    SUBCASE("batch samples are drawn without replacement") {
        DqnAgent distinct_agent(config, 23);
        for (int i = 0; i < 12; ++i)
            distinct_agent.remember(
                {{static_cast<double>(i), 0.0}, 0, 0.0, {static_cast<double>(i), 0.0}, false});
        for (int round = 0; round < 20; ++round) {
            distinct_agent.replay(10);
            std::vector<double> keys;
            for (const auto& record : distinct_agent.last_replay_batch())
                keys.push_back(record.entry.state[0]);
            std::sort(keys.begin(), keys.end());
            CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
        }
    }

    SUBCASE("replay requires more memory than the batch") {
        DqnAgent starved(config, 1);
        starved.remember({{0.0, 0.0}, 0, 1.0, {0.0, 0.0}, true});
        CHECK_THROWS_AS(starved.replay(4), std::logic_error);
    }
}

TEST_CASE("batch loss gradient matches central finite differences") {
    AgentConfig config;
    config.state_size = 3;
    config.action_size = 3;
    config.hidden_sizes = {4};
    config.dropout_rate = 0.0;
    Network net = build_network(config, 23);

    Rng rng(6);
    std::vector<std::vector<double>> states, targets;
    for (int i = 0; i < 5; ++i) {
        states.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        targets.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    }

    Gradients grads;
    batch_loss_and_gradients(net, states, targets, false, 0.0, nullptr, &grads);

    const double h = 1e-5;
    auto loss_at = [&]() { return batch_loss_and_gradients(net, states, targets, false, 0.0, nullptr, nullptr); };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        for (std::size_t i = 0; i < net.layers[l].weights.size(); i += 3) {
            const double saved = net.layers[l].weights[i];
            net.layers[l].weights[i] = saved + h;
            const double up = loss_at();
            net.layers[l].weights[i] = saved - h;
            const double down = loss_at();
            net.layers[l].weights[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            CHECK(grads.layers[l].weights[i] ==
                  doctest::Approx(fd).epsilon(1e-4).scale(std::max(1e-3, std::abs(fd))));
        }
        for (std::size_t i = 0; i < net.layers[l].biases.size(); ++i) {
            const double saved = net.layers[l].biases[i];
            net.layers[l].biases[i] = saved + h;
            const double up = loss_at();
            net.layers[l].biases[i] = saved - h;
            const double down = loss_at();
            net.layers[l].biases[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            CHECK(grads.layers[l].biases[i] ==
                  doctest::Approx(fd).epsilon(1e-4).scale(std::max(1e-3, std::abs(fd))));
        }
    }
}

TEST_CASE("adam with a zero gradient leaves weights unchanged") {
    AgentConfig config = small_config(2, 2);
    Network net = build_network(config, 31);
    const Network before = net;
    Gradients zero;
    for (const auto& layer : net.layers) {
        Network::Layer g;
        g.in = layer.in;
        g.out = layer.out;
        g.weights.assign(layer.weights.size(), 0.0);
        g.biases.assign(layer.biases.size(), 0.0);
        zero.layers.push_back(g);
    }
    AdamOptimizer adam(0.01);
    adam.step(net, zero);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        CHECK(net.layers[l].weights == before.layers[l].weights);
        CHECK(net.layers[l].biases == before.layers[l].biases);
    }
}

TEST_CASE("weights round trip through the versioned file") {
    const Network net = build_network(small_config(), 77);
    const auto path = (std::filesystem::temp_directory_path() / "stocklab_weights.json").string();
    save_weights(net, path);

    {
        std::ifstream in(path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(text.find("\"format_version\": 1") != std::string::npos);
    }

    const Network loaded = load_weights(path);
    Rng rng(4);
    for (int i = 0; i < 10; ++i) {
        const std::vector<double> state{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                                        rng.uniform(-2.0, 2.0)};
        const auto a = forward(net, state);
        const auto b = forward(loaded, state);
        for (std::size_t k = 0; k < a.size(); ++k)
            CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
    }

    const auto bad_path =
        (std::filesystem::temp_directory_path() / "stocklab_weights_bad.json").string();
    std::ofstream bad(bad_path);
    bad << R"({"format_version": 1, "layers": [{"in": 2, "out": 2, "weights": [1.0], "biases": [0.0, 0.0]}]})";
    bad.close();
    CHECK_THROWS_AS(load_weights(bad_path), DataError);
    CHECK_THROWS_AS(load_weights("/no/such/weights.json"), DataError);
}

TEST_CASE("training loop logs one entry per episode and is deterministic") {
    const Frame frame = tiny_env_frame(25);
    AgentConfig config = default_agent_config(ModelKind::lost_sales);
    config.episodes = 3;
    config.hidden_sizes = {8, 8};

    auto env1 = make_env(ModelKind::lost_sales, frame, default_costs(ModelKind::lost_sales));
    const TrainLog log1 = train(env1, config, 2024);
    CHECK(log1.total_rewards.size() == 3);
    CHECK(log1.epsilons.size() == 3);
    for (std::size_t i = 1; i < log1.epsilons.size(); ++i)
        CHECK(log1.epsilons[i] <= log1.epsilons[i - 1]);
    for (double e : log1.epsilons) CHECK(e >= 0.01);

    auto env2 = make_env(ModelKind::lost_sales, frame, default_costs(ModelKind::lost_sales));
    const TrainLog log2 = train(env2, config, 2024);
    CHECK(log1.total_rewards == log2.total_rewards);
    CHECK(log1.epsilons == log2.epsilons);

    AgentConfig mismatched = config;
    mismatched.action_size = 4;
    auto env3 = make_env(ModelKind::lost_sales, frame, default_costs(ModelKind::lost_sales));
    CHECK_THROWS_AS(train(env3, mismatched, 1), std::invalid_argument);
}

TEST_CASE("training runs on the extended-observation presets") {
    const Frame frame = tiny_env_frame(15);
    for (ModelKind kind : {ModelKind::dual_sourcing, ModelKind::multi_echelon}) {
        AgentConfig config = default_agent_config(kind);
        config.episodes = 2;
        config.hidden_sizes = {8, 8};
        auto env = make_env(kind, frame, default_costs(kind));
        const TrainLog log = train(env, config, 99);
        CHECK(log.total_rewards.size() == 2);
        CHECK(log.epsilons.size() == 2);
    }
}

TEST_CASE("preset configurations") {
    const AgentConfig lost = default_agent_config(ModelKind::lost_sales);
    CHECK(lost.gamma == 0.9);
    CHECK(lost.hidden_sizes == std::vector<std::size_t>{64, 64});
    CHECK(lost.memory_capacity == 5000);
    CHECK(lost.epsilon_decay == 0.995);
    CHECK(lost.learning_rate == 0.001);
    CHECK(lost.dropout_rate == 0.1);
    CHECK(lost.episodes == 100);
    CHECK(lost.batch_size == 10);

    const AgentConfig multi = default_agent_config(ModelKind::multi_echelon);
    CHECK(multi.gamma == 0.95);
    CHECK(multi.hidden_sizes == std::vector<std::size_t>{128, 128});

    const AgentConfig tuned = tuned_agent_config(ModelKind::lost_sales);
    CHECK(tuned.epsilon_decay == 0.885);
    CHECK(tuned.learning_rate == 0.005);
    CHECK(tuned.hidden_sizes == std::vector<std::size_t>{64, 128});
    CHECK(tuned.dropout_rate == 0.3);
    // Only the four tuned fields differ from the defaults.
    CHECK(tuned.gamma == lost.gamma);
    CHECK(tuned.memory_capacity == lost.memory_capacity);
    CHECK(tuned.batch_size == lost.batch_size);
    CHECK(tuned.episodes == lost.episodes);
    CHECK(tuned.epsilon_min == lost.epsilon_min);

    const AgentConfig tuned_multi = tuned_agent_config(ModelKind::multi_echelon);
    CHECK(tuned_multi.hidden_sizes == std::vector<std::size_t>{128, 128});
    CHECK(tuned_multi.gamma == 0.95);
}
