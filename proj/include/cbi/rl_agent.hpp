#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace cbi {

struct Hyperparams {
    double gamma = 0.9;   // weight of future rewards
    double beta = 0.01;   // learning rate
    int lookahead = 5;    // u consecutive future steps
    int hidden = 32;
    std::uint64_t seed = 0;
};

// Per-rule reward bookkeeping: cumulative delta-Q and selection counts.
class RewardLedger {
public:
    explicit RewardLedger(int n_rules) : cumulative_(n_rules, 0.0), count_(n_rules, 0) {}

    void record(int rule_id, double delta_q);
    // cumulative delta-Q of the rule divided by its selection count;
    // throws DivisionGuard when the rule was never selected.
    double actual_reward(int rule_id) const;
    double mean_or_zero(int rule_id) const;
    int count(int rule_id) const { return count_.at(index(rule_id)); }
    double cumulative(int rule_id) const { return cumulative_.at(index(rule_id)); }
    int rules() const { return static_cast<int>(count_.size()); }
    int total_steps() const { return steps_; }

private:
    size_t index(int rule_id) const;
    std::vector<double> cumulative_;
    std::vector<int> count_;
    int steps_ = 0;
};

// The observation fed to both networks.
struct AgentState {
    Eigen::VectorXd features;
};

// [t/T_max, sim, div, n/N_max, one-hot last rule, per-rule mean delta-Q]
AgentState build_agent_state(int t, int t_max, double sim, double div, int n, int n_max,
                             int last_rule, const RewardLedger& ledger);

// a_loss = sum_{i=0..u} gamma^i * r[i] + gamma^(u+1) * pr_t_plus_u - pr_t
double advantage_loss(std::span<const double> rewards, double pr_t, double pr_t_plus_u,
                      double gamma);

// One hidden tanh layer; weights uniform in [-0.1, 0.1], biases zero.
class SmallNet {
public:
    struct Grads {
        Eigen::MatrixXd w1, w2;
        Eigen::VectorXd b1, b2;
        bool all_finite() const;
    };

    SmallNet(int in, int hidden, int out, std::mt19937_64& rng);

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    // Gradients of g_out . output with respect to every parameter.
    Grads backward(const Eigen::VectorXd& x, const Eigen::VectorXd& g_out) const;
    void apply(const Grads& g, double scale);

    int in_dim() const { return static_cast<int>(w1.cols()); }
    int out_dim() const { return static_cast<int>(w2.rows()); }

    void save(std::ostream& os) const;
    static SmallNet load(std::istream& is);

    Eigen::MatrixXd w1, w2;
    Eigen::VectorXd b1, b2;

private:
    SmallNet() = default;
};

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// Advantage actor-critic over a fixed discrete rule set. The actor emits
// rule probabilities; the critic predicts the potential reward. Updates
// follow one ascent step on log P(a|s) * a_loss for the actor and the
// matching regression step toward the bootstrapped return for the critic.
class A2cAgent {
public:
    A2cAgent(int feature_dim, int n_rules, Hyperparams hp);

    // Samples the policy; the very first call is uniform-random.
    int select_action(const AgentState& state);
    Eigen::VectorXd policy(const AgentState& state) const;
    double predict_value(const AgentState& state) const;

    // One Eq.-11 step on both networks; throws NonFiniteGradient (leaving
    // the weights untouched) when the loss or any gradient is non-finite.
    void update_weights(const AgentState& state, int rule_id, double a_loss);
    void update_weights(const AgentState& state, int rule_id, double a_loss, double beta);

    // u-step pipeline: buffers transitions and trains the step that falls
    // out of the lookahead window.
    void observe(const AgentState& state, int rule_id, double reward);
    // Flushes the buffer with shrinking lookahead and a zero terminal value.
    void finish_episode();

    RewardLedger& ledger() { return ledger_; }
    const RewardLedger& ledger() const { return ledger_; }
    const Hyperparams& hyperparams() const { return hp_; }
    int rules() const { return n_rules_; }
    bool has_acted() const { return acted_; }

    void save(std::ostream& os) const;
    static A2cAgent load(std::istream& is);

    SmallNet& policy_net() { return policy_; }
    SmallNet& value_net() { return value_; }

private:
    struct PendingStep {
        AgentState state;
        int rule_id;
        double reward;
        double predicted;
    };
    void train_front(size_t window, double terminal_value, bool bootstrap_from_back);

    int n_rules_;
    Hyperparams hp_;
    std::mt19937_64 rng_;
    SmallNet policy_;
    SmallNet value_;
    RewardLedger ledger_;
    std::deque<PendingStep> buffer_;
    bool acted_ = false;
};

}  // namespace cbi
