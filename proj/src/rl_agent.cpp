#include "cbi/rl_agent.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "cbi/errors.hpp"

namespace cbi {

// --- ledger -------------------------------------------------------------------

size_t RewardLedger::index(int rule_id) const {
    if (rule_id < 1 || rule_id > rules())
        throw Error("rule id out of range: " + std::to_string(rule_id));
    return static_cast<size_t>(rule_id - 1);
}

void RewardLedger::record(int rule_id, double delta_q) {
    size_t i = index(rule_id);
    cumulative_[i] += delta_q;
    ++count_[i];
    ++steps_;
}

double RewardLedger::actual_reward(int rule_id) const {
    size_t i = index(rule_id);
    if (count_[i] == 0)
        throw DivisionGuard("rule " + std::to_string(rule_id) + " was never selected");
    return cumulative_[i] / count_[i];
}

double RewardLedger::mean_or_zero(int rule_id) const {
    size_t i = index(rule_id);
    return count_[i] == 0 ? 0.0 : cumulative_[i] / count_[i];
}

AgentState build_agent_state(int t, int t_max, double sim, double div, int n, int n_max,
                             int last_rule, const RewardLedger& ledger) {
    const int r = ledger.rules();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(4 + 2 * r);
    f(0) = t_max > 0 ? static_cast<double>(t) / t_max : 0.0;
    f(1) = sim;
    f(2) = div;
    f(3) = n_max > 0 ? static_cast<double>(n) / n_max : 0.0;
    if (last_rule >= 1 && last_rule <= r) f(3 + last_rule) = 1.0;
    for (int j = 1; j <= r; ++j) f(3 + r + j) = ledger.mean_or_zero(j);
    return AgentState{std::move(f)};
}

double advantage_loss(std::span<const double> rewards, double pr_t, double pr_t_plus_u,
                      double gamma) {
    if (rewards.empty()) throw Error("advantage loss needs at least one reward");
    double acc = 0;
    double g = 1.0;
    for (double r : rewards) {
        acc += g * r;
        g *= gamma;
    }
    // after the loop g == gamma^(u+1)
    return acc + g * pr_t_plus_u - pr_t;
}

// --- network ------------------------------------------------------------------

SmallNet::SmallNet(int in, int hidden, int out, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-0.1, 0.1);
    w1.resize(hidden, in);
    w2.resize(out, hidden);
    for (int r = 0; r < hidden; ++r)
        for (int c = 0; c < in; ++c) w1(r, c) = dist(rng);
    for (int r = 0; r < out; ++r)
        for (int c = 0; c < hidden; ++c) w2(r, c) = dist(rng);
    b1 = Eigen::VectorXd::Zero(hidden);
    b2 = Eigen::VectorXd::Zero(out);
}

Eigen::VectorXd SmallNet::forward(const Eigen::VectorXd& x) const {
    Eigen::VectorXd h = (w1 * x + b1).array().tanh();
    return w2 * h + b2;
}

SmallNet::Grads SmallNet::backward(const Eigen::VectorXd& x, const Eigen::VectorXd& g_out) const {
    Eigen::VectorXd z = w1 * x + b1;
    Eigen::VectorXd h = z.array().tanh();
    Grads g;
    g.w2 = g_out * h.transpose();
    g.b2 = g_out;
    Eigen::VectorXd dh = w2.transpose() * g_out;
    Eigen::VectorXd dz = dh.array() * (1.0 - h.array().square());
    g.w1 = dz * x.transpose();
    g.b1 = dz;
    return g;
}

bool SmallNet::Grads::all_finite() const {
    return w1.allFinite() && w2.allFinite() && b1.allFinite() && b2.allFinite();
}

void SmallNet::apply(const Grads& g, double scale) {
    w1 += scale * g.w1;
    b1 += scale * g.b1;
    w2 += scale * g.w2;
    b2 += scale * g.b2;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
    Eigen::VectorXd e = shifted.array().exp();
    return e / e.sum();
}

// --- serialization -------------------------------------------------------------

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
void write_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
double read_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    write_u32(os, static_cast<std::uint32_t>(m.rows()));
    write_u32(os, static_cast<std::uint32_t>(m.cols()));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) write_f64(os, m(r, c));
}
Eigen::MatrixXd read_matrix(std::istream& is) {
    std::uint32_t rows = read_u32(is), cols = read_u32(is);
    Eigen::MatrixXd m(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = read_f64(is);
    return m;
}
void write_string(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string read_string(std::istream& is) {
    std::uint32_t n = read_u32(is);
    std::string s(n, '\0');
    is.read(s.data(), n);
    return s;
}

constexpr char kMagic[8] = {'C', 'B', 'I', 'A', 'G', 'T', '0', '1'};

}  // namespace

void SmallNet::save(std::ostream& os) const {
    write_matrix(os, w1);
    write_matrix(os, w2);
    write_matrix(os, b1);
    write_matrix(os, b2);
}

SmallNet SmallNet::load(std::istream& is) {
    SmallNet net;
    net.w1 = read_matrix(is);
    net.w2 = read_matrix(is);
    net.b1 = read_matrix(is).col(0);
    net.b2 = read_matrix(is).col(0);
    return net;
}

// --- agent --------------------------------------------------------------------

A2cAgent::A2cAgent(int feature_dim, int n_rules, Hyperparams hp)
    : n_rules_(n_rules),
      hp_(hp),
      rng_(hp.seed),
      policy_(feature_dim, hp.hidden, n_rules, rng_),
      value_(feature_dim, hp.hidden, 1, rng_),
      ledger_(n_rules) {}

Eigen::VectorXd A2cAgent::policy(const AgentState& state) const {
    return softmax(policy_.forward(state.features));
}

double A2cAgent::predict_value(const AgentState& state) const {
    return value_.forward(state.features)(0);
}

int A2cAgent::select_action(const AgentState& state) {
    if (!acted_) {
        acted_ = true;
        std::uniform_int_distribution<int> uniform(1, n_rules_);
        return uniform(rng_);
    }
    Eigen::VectorXd p = policy(state);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng_);
    double acc = 0;
    for (int i = 0; i < n_rules_; ++i) {
        acc += p(i);
        if (u < acc) return i + 1;
    }
    return n_rules_;
}

void A2cAgent::update_weights(const AgentState& state, int rule_id, double a_loss) {
    update_weights(state, rule_id, a_loss, hp_.beta);
}

void A2cAgent::update_weights(const AgentState& state, int rule_id, double a_loss, double beta) {
    if (!std::isfinite(a_loss)) throw NonFiniteGradient();
    if (rule_id < 1 || rule_id > n_rules_)
        throw Error("rule id out of range: " + std::to_string(rule_id));

    // actor: grad of log P(a|s) scaled by the advantage
    Eigen::VectorXd p = policy(state);
    Eigen::VectorXd g_logits = -p;
    g_logits(rule_id - 1) += 1.0;
    SmallNet::Grads pg = policy_.backward(state.features, g_logits);

    // critic: one regression step toward the bootstrapped return
    // (target - V(s) equals the advantage, so the step is a_loss * dV/dw)
    Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    SmallNet::Grads vg = value_.backward(state.features, one);

    if (!pg.all_finite() || !vg.all_finite()) throw NonFiniteGradient();
    policy_.apply(pg, beta * a_loss);
    value_.apply(vg, beta * a_loss);
}

void A2cAgent::train_front(size_t window, double terminal_value, bool bootstrap_from_back) {
    const PendingStep& oldest = buffer_.front();
    std::vector<double> rewards;
    rewards.reserve(window);
    for (size_t i = 0; i < window; ++i) rewards.push_back(buffer_[i].reward);
    double pr_tail = bootstrap_from_back ? buffer_[window - 1].predicted : terminal_value;
    double loss = advantage_loss(rewards, oldest.predicted, pr_tail, hp_.gamma);
    update_weights(oldest.state, oldest.rule_id, loss);
    buffer_.pop_front();
}

void A2cAgent::observe(const AgentState& state, int rule_id, double reward) {
    buffer_.push_back({state, rule_id, reward, predict_value(state)});
    if (buffer_.size() == static_cast<size_t>(hp_.lookahead) + 1)
        train_front(buffer_.size(), 0.0, /*bootstrap_from_back=*/true);
}

void A2cAgent::finish_episode() {
    while (!buffer_.empty()) train_front(buffer_.size(), 0.0, /*bootstrap_from_back=*/false);
}

void A2cAgent::save(std::ostream& os) const {
    os.write(kMagic, sizeof(kMagic));
    write_u32(os, static_cast<std::uint32_t>(n_rules_));
    write_u32(os, static_cast<std::uint32_t>(policy_.in_dim()));
    write_f64(os, hp_.gamma);
    write_f64(os, hp_.beta);
    write_u32(os, static_cast<std::uint32_t>(hp_.lookahead));
    write_u32(os, static_cast<std::uint32_t>(hp_.hidden));
    std::ostringstream rng_state;
    rng_state << rng_;
    write_string(os, rng_state.str());
    write_u32(os, acted_ ? 1 : 0);
    policy_.save(os);
    value_.save(os);
    write_u32(os, static_cast<std::uint32_t>(ledger_.rules()));
    for (int j = 1; j <= ledger_.rules(); ++j) {
        write_f64(os, ledger_.cumulative(j));
        write_u32(os, static_cast<std::uint32_t>(ledger_.count(j)));
    }
    write_u32(os, static_cast<std::uint32_t>(ledger_.total_steps()));
}

A2cAgent A2cAgent::load(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::string(magic, 8) != std::string(kMagic, 8))
        throw Error("not an agent checkpoint");
    std::uint32_t n_rules = read_u32(is);
    std::uint32_t feature_dim = read_u32(is);
    Hyperparams hp;
    hp.gamma = read_f64(is);
    hp.beta = read_f64(is);
    hp.lookahead = static_cast<int>(read_u32(is));
    hp.hidden = static_cast<int>(read_u32(is));
    std::string rng_state = read_string(is);
    bool acted = read_u32(is) != 0;

    A2cAgent agent(static_cast<int>(feature_dim), static_cast<int>(n_rules), hp);
    std::istringstream rs(rng_state);
    rs >> agent.rng_;
    agent.acted_ = acted;
    agent.policy_ = SmallNet::load(is);
    agent.value_ = SmallNet::load(is);
    std::uint32_t rules = read_u32(is);
    RewardLedger ledger(static_cast<int>(rules));
    for (std::uint32_t j = 0; j < rules; ++j) {
        double cum = read_f64(is);
        std::uint32_t count = read_u32(is);
        // rebuild the per-rule totals; intermediate step order is not retained
        if (count > 0) {
            for (std::uint32_t k = 0; k + 1 < count; ++k) ledger.record(static_cast<int>(j) + 1, 0);
            ledger.record(static_cast<int>(j) + 1, cum);
        }
    }
    std::uint32_t steps = read_u32(is);
    (void)steps;
    agent.ledger_ = ledger;
    if (!is) throw Error("truncated agent checkpoint");
    return agent;
}

}  // namespace cbi
