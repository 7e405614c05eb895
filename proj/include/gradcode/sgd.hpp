#pragma once

#include "gradcode/code.hpp"
#include "gradcode/decode.hpp"
#include "gradcode/errors.hpp"
#include "gradcode/rational.hpp"
#include "gradcode/straggler.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

namespace gradcode {

/// Synthetic least-squares instance: standard-normal samples, targets
/// X w* + sigma * noise, and a consecutive-index partition of the samples
/// into `parts` equal pieces.
struct SyntheticDataset {
    Eigen::MatrixXd samples;       // M x d
    Eigen::VectorXd targets;       // M
    Eigen::VectorXd true_weights;  // d
    double noise = 0.0;
    int parts = 0;
    int part_size = 0;
};

namespace detail {

// Box-Muller over SplitMix64 draws; one generator state per dataset.
class SeededNormal {
public:
    explicit SeededNormal(std::uint64_t seed) : state_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        do {
            u = uniform();
        } while (u <= 0.0);
        const double v = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u));
        spare_ = radius * std::sin(2.0 * M_PI * v);
        have_spare_ = true;
        return radius * std::cos(2.0 * M_PI * v);
    }

private:
    double uniform() { return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53; }

    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace detail

inline SyntheticDataset make_dataset(int samples, int dim, int parts, double noise, std::uint64_t seed) {
    if (dim < 1 || parts < 1 || samples < 1) throw Error("dataset dimensions must be positive");
    if (samples % parts != 0) throw Indivisible("parts must divide the sample count");
    if (noise < 0.0) throw Error("noise level must be nonnegative");

    detail::SeededNormal normal(seed);
    SyntheticDataset dataset;
    dataset.samples.resize(samples, dim);
    for (int i = 0; i < samples; ++i) {
        for (int j = 0; j < dim; ++j) dataset.samples(i, j) = normal();
    }
    dataset.true_weights.resize(dim);
    for (int j = 0; j < dim; ++j) dataset.true_weights(j) = normal();
    dataset.targets = dataset.samples * dataset.true_weights;
    if (noise > 0.0) {
        for (int i = 0; i < samples; ++i) dataset.targets(i) += noise * normal();
    }
    dataset.noise = noise;
    dataset.parts = parts;
    dataset.part_size = samples / parts;
    return dataset;
}

inline double empirical_loss(const SyntheticDataset& dataset, const Eigen::VectorXd& weights) {
    return (dataset.samples * weights - dataset.targets).squaredNorm() / dataset.samples.rows();
}

/// Column i sums the squared-error gradients 2 x (x'w - y) over part i.
inline Eigen::MatrixXd partial_gradients(const SyntheticDataset& dataset, const Eigen::VectorXd& weights) {
    const int dim = static_cast<int>(dataset.samples.cols());
    Eigen::MatrixXd partials = Eigen::MatrixXd::Zero(dim, dataset.parts);
    const Eigen::VectorXd residuals = dataset.samples * weights - dataset.targets;
    for (int part = 0; part < dataset.parts; ++part) {
        for (int local = 0; local < dataset.part_size; ++local) {
            const int row = part * dataset.part_size + local;
            partials.col(part) += 2.0 * residuals(row) * dataset.samples.row(row).transpose();
        }
    }
    return partials;
}

enum class DecoderChoice { Closed, Oracle };

/// One encode -> straggle -> decode round. Worker j's message is
/// (1/K) sum_i partials_i E_{i,j}; the estimate is the survivors' messages
/// combined with the decoding vector, so it approximates (1/K) of the true
/// gradient sum. `deviation` is ||estimate - truth/K|| and `bound` the
/// guarantee (1/K) ||G||_2 sqrt(err).
struct GradientRound {
    int step = 0;
    Eigen::VectorXd weights;
    Eigen::MatrixXd partials;   // d x K
    Eigen::MatrixXd messages;   // d x N
    Eigen::VectorXd true_sum;   // d
    Eigen::VectorXd estimate;   // d
    StragglerScenario scenario;
    DecodeMethod method = DecodeMethod::OracleFloat;
    double err = 0.0;
    double deviation = 0.0;
    double bound = 0.0;
    bool bound_holds = false;
};

inline GradientRound coded_round(const GradientCode& code, const SyntheticDataset& dataset,
                                 const Eigen::VectorXd& weights, const StragglerScenario& scenario,
                                 DecoderChoice choice = DecoderChoice::Closed) {
    if (code.parts != dataset.parts) throw Error("code and dataset disagree on the part count");

    GradientRound round;
    round.weights = weights;
    round.scenario = scenario;
    round.partials = partial_gradients(dataset, weights);
    round.true_sum = round.partials.rowwise().sum();
    round.messages = round.partials * code.encoding.cast<double>() / code.parts;

    const DecodeResult decoded =
        choice == DecoderChoice::Closed ? decode_auto(code, scenario) : oracle_decode(code, scenario);
    round.method = decoded.method;
    round.err = decoded.err;

    Eigen::MatrixXd surviving(round.messages.rows(), scenario.survivors.size());
    for (std::size_t idx = 0; idx < scenario.survivors.size(); ++idx) {
        surviving.col(static_cast<int>(idx)) = round.messages.col(scenario.survivors[idx]);
    }
    round.estimate = surviving * decoded.v;

    round.deviation = (round.estimate - round.true_sum / code.parts).norm();
    const double spectral_norm = round.partials.jacobiSvd().singularValues()(0);
    round.bound = spectral_norm * std::sqrt(std::max(0.0, decoded.err)) / code.parts;
    round.bound_holds = round.deviation <= round.bound + 1e-9 * (1.0 + round.bound);
    return round;
}

/// Exact-arithmetic variant of a round for integer partial gradients
/// (d x K, column per part): messages, decoding, and the estimate stay
/// rational, so zero-error scenarios reproduce the scaled gradient sum
/// exactly.
struct ExactRound {
    std::vector<Rat> estimate_scaled;  // d entries, already multiplied by K
    std::vector<Rat> true_sum;         // d entries
    bool exact_match = false;
    Rat err = 0;
};

inline ExactRound exact_coded_round(const GradientCode& code, const std::vector<std::vector<Int>>& partials,
                                    const StragglerScenario& scenario, DecoderChoice choice = DecoderChoice::Closed) {
    const int dim = static_cast<int>(partials.size());
    if (dim == 0 || static_cast<int>(partials[0].size()) != code.parts) {
        throw Error("partial-gradient matrix must be d x K");
    }

    const DecodeResult decoded =
        choice == DecoderChoice::Closed ? decode_auto(code, scenario) : oracle_decode(code, scenario);
    if (!decoded.exact) throw Error("exact round needs an exact decoding vector");

    ExactRound round;
    round.err = decoded.err_exact;
    round.true_sum.resize(dim);
    for (int row = 0; row < dim; ++row) {
        Rat total = 0;
        for (int part = 0; part < code.parts; ++part) total += Rat(partials[row][part]);
        round.true_sum[row] = total;
    }

    // estimate * K = sum over survivors of v_j * sum_i partials_i E_{i,j}
    round.estimate_scaled.assign(dim, Rat(0));
    auto& estimate = round.estimate_scaled;
    for (std::size_t idx = 0; idx < scenario.survivors.size(); ++idx) {
        const int worker = scenario.survivors[idx];
        for (int row = 0; row < dim; ++row) {
            Rat message = 0;
            for (int part = 0; part < code.parts; ++part) {
                if (code.encoding(part, worker) != 0) message += Rat(partials[row][part]);
            }
            estimate[row] += decoded.v_exact[idx] * message;
        }
    }

    round.exact_match = true;
    for (int row = 0; row < dim; ++row) {
        if (estimate[row] != round.true_sum[row]) round.exact_match = false;
    }
    return round;
}

struct SgdPolicy {
    enum class Kind { None, Random, Greedy };
    Kind kind = Kind::None;
    int stragglers = 0;
    std::uint64_t seed = 0;
};

struct SgdStep {
    int step = 0;
    double loss = 0.0;
    double err = 0.0;
    double deviation = 0.0;
};

/// Full-batch gradient descent over the partitioned batch with coded
/// aggregation: w <- w - alpha * K * estimate. Loss is recorded at the
/// pre-update iterate. Deterministic for a fixed policy and seed.
inline std::vector<SgdStep> run_sgd(const GradientCode& code, const SyntheticDataset& dataset,
                                    const SgdPolicy& policy, int steps, double alpha,
                                    DecoderChoice choice = DecoderChoice::Closed) {
    if (steps < 1) throw Error("need at least one step");
    if (alpha < 0.0) throw Error("learning rate must be nonnegative");

    StragglerScenario greedy_set;
    if (policy.kind == SgdPolicy::Kind::Greedy) {
        greedy_set = greedy_scenario_with_budget(code, policy.stragglers);
    }

    std::vector<SgdStep> trajectory;
    trajectory.reserve(steps);
    Eigen::VectorXd weights = Eigen::VectorXd::Zero(dataset.samples.cols());
    for (int step = 0; step < steps; ++step) {
        StragglerScenario scenario;
        switch (policy.kind) {
            case SgdPolicy::Kind::None:
                scenario = StragglerScenario::from_stragglers(code.workers, {});
                break;
            case SgdPolicy::Kind::Random:
                scenario = random_stragglers(code.workers, policy.stragglers, policy.seed + static_cast<std::uint64_t>(step));
                break;
            case SgdPolicy::Kind::Greedy:
                scenario = greedy_set;
                break;
        }
        const GradientRound round = coded_round(code, dataset, weights, scenario, choice);
        trajectory.push_back({step, empirical_loss(dataset, weights), round.err, round.deviation});
        weights -= alpha * code.parts * round.estimate;
    }
    return trajectory;
}

}  // namespace gradcode
