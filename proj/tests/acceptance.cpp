// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line (with its runtime) and the process exits nonzero if any fail.

#include "gradcode/serialize.hpp"
#include "gradcode/sgd.hpp"
#include "gradcode/straggler.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace gradcode;

namespace {

struct Check {
    std::vector<std::string> failures;

    void require(bool condition, const std::string& what) {
        if (!condition) failures.push_back(what);
    }
};

long long geometric_sum(int q, int exponent) {
    long long total = 0, power = 1;
    for (int i = 0; i < exponent; ++i) { total += power; power *= q; }
    return total;
}

std::vector<Rat> normal_residual(const GradientCode& code, const StragglerScenario& scenario,
                                 const std::vector<Rat>& v) {
    std::vector<Rat> fitted(code.parts, Rat(0));
    for (std::size_t idx = 0; idx < scenario.survivors.size(); ++idx) {
        for (int part = 0; part < code.parts; ++part) {
            if (code.encoding(part, scenario.survivors[idx]) != 0) fitted[part] += v[idx];
        }
    }
    for (int part = 0; part < code.parts; ++part) fitted[part] -= 1;
    std::vector<Rat> residual(scenario.survivors.size(), Rat(0));
    for (std::size_t idx = 0; idx < scenario.survivors.size(); ++idx) {
        for (int part = 0; part < code.parts; ++part) {
            if (code.encoding(part, scenario.survivors[idx]) != 0) residual[idx] += fitted[part];
        }
    }
    return residual;
}

// ---- criterion 1: construction grid ----------------------------------------

void criterion_design_axioms(Check& check) {
    for (int q : {2, 3, 4, 5, 7, 8, 9}) {
        for (int m : {2, 3}) {
            const std::string tag = " (q=" + std::to_string(q) + ", m=" + std::to_string(m) + ")";
            long long v_pg = geometric_sum(q, m + 1), k_pg = geometric_sum(q, m),
                      lambda = geometric_sum(q, m - 1);

            Design pg = projective_geometry(m, q);
            check.require(pg.params == BIBDParams{static_cast<int>(v_pg), static_cast<int>(v_pg),
                                                  static_cast<int>(k_pg), static_cast<int>(k_pg), lambda},
                          "projective parameters" + tag);

            Design pg_dual = dual(pg);
            check.require(pg_dual.params == pg.params, "dual of symmetric design verifies" + tag);

            Design pg_derived = derived_design(pg, 0);
            check.require(pg_derived.params == BIBDParams{static_cast<int>(k_pg), static_cast<int>(v_pg - 1),
                                                          static_cast<int>(lambda), static_cast<int>(k_pg - 1),
                                                          lambda - 1},
                          "derived parameters" + tag);

            Design pg_residual = residual_design(pg, 0);
            check.require(pg_residual.params == BIBDParams{static_cast<int>(v_pg - k_pg),
                                                           static_cast<int>(v_pg - 1),
                                                           static_cast<int>(k_pg - lambda),
                                                           static_cast<int>(k_pg), lambda},
                          "residual parameters" + tag);

            auto [ag, resolution] = affine_geometry(m, q);
            long long v_ag = 1;
            for (int i = 0; i < m; ++i) v_ag *= q;
            check.require(ag.params == BIBDParams{static_cast<int>(v_ag),
                                                  static_cast<int>(q * geometric_sum(q, m)),
                                                  static_cast<int>(v_ag / q),
                                                  static_cast<int>(geometric_sum(q, m)), lambda},
                          "affine parameters" + tag);
            check.require(static_cast<long long>(resolution.classes.size()) == geometric_sum(q, m),
                          "affine resolution class count" + tag);

            // code-level parameters follow the construction table
            GradientCode pg_code = code_from_design(pg);
            check.require(pg_code.workers == v_pg && pg_code.parts == v_pg && pg_code.load == k_pg &&
                              pg_code.replication == k_pg,
                          "projective code parameters" + tag);
            GradientCode dual_code = code_from_design(ag, {.dual = true});
            check.require(dual_code.workers == v_ag && dual_code.parts == q * geometric_sum(q, m) &&
                              dual_code.load == geometric_sum(q, m) && dual_code.replication == v_ag / q,
                          "dual-affine code parameters" + tag);
            GradientCode ag_code = code_from_design(ag, {.resolution = &resolution});
            check.require(ag_code.workers == q * geometric_sum(q, m) && ag_code.parts == v_ag &&
                              ag_code.load == v_ag / q && ag_code.replication == geometric_sum(q, m),
                          "affine code parameters" + tag);
        }
    }
    for (int m : {2, 3}) {
        Design hadamard = hadamard_design(m);
        check.require(hadamard.params == BIBDParams{4 * m - 1, 4 * m - 1, 2 * m - 1, 2 * m - 1, m - 1},
                      "hadamard parameters (m=" + std::to_string(m) + ")");
    }
}

// ---- criteria 2-4: closed forms against the exact oracle -------------------

void criterion_symmetric_equivalence(Check& check) {
    const GradientCode code = code_from_design(projective_geometry(2, 2));
    int scenarios = 0, ties = 0;
    for (int count = 0; count <= 4; ++count) {
        for_each_combination(code.workers, count, [&](const std::vector<int>& subset) {
            const auto scenario = StragglerScenario::from_stragglers(code.workers, subset);
            const DecodeResult closed = decode_symmetric(code, scenario);
            const DecodeResult oracle = oracle_decode(code, scenario);
            ++scenarios;
            check.require(oracle.exact, "oracle used the exact path");
            check.require(closed.err_exact == oracle.err_exact, "closed error equals oracle error");
            for (const Rat& entry : normal_residual(code, scenario, closed.v_exact)) {
                check.require(entry == 0, "closed decoding vector satisfies the normal equations");
            }
            if (count == 2) ties += closed.err_exact == Rat(4, 7);
        });
    }
    check.require(scenarios == 99, "covered every straggler set with at most four stragglers");
    check.require(ties == 21, "every two-straggler set hits exactly 4/7");
}

void criterion_dual_equivalence(Check& check) {
    auto [design, resolution] = affine_geometry(2, 3);
    const GradientCode code = code_from_design(design, {.dual = true});
    for (int count = 0; count <= 3; ++count) {
        std::optional<Rat> level;
        for_each_combination(code.workers, count, [&](const std::vector<int>& subset) {
            const auto scenario = StragglerScenario::from_stragglers(code.workers, subset);
            const DecodeResult closed = decode_dual(code, scenario);
            const DecodeResult oracle = oracle_decode(code, scenario);
            check.require(oracle.exact && closed.err_exact == oracle.err_exact,
                          "dual closed form equals the oracle");
            for (const Rat& entry : normal_residual(code, scenario, closed.v_exact)) {
                check.require(entry == 0, "dual decoding vector satisfies the normal equations");
            }
            if (!level) level = closed.err_exact;
            check.require(closed.err_exact == *level, "error depends only on the straggler count");
        });
    }
}

void criterion_resolvable_equivalence(Check& check) {
    auto [design, resolution] = affine_geometry(2, 3);
    const GradientCode code = code_from_design(design, {.resolution = &resolution});
    for (int count = 0; count <= 4; ++count) {
        for_each_combination(code.workers, count, [&](const std::vector<int>& subset) {
            const auto scenario = StragglerScenario::from_stragglers(code.workers, subset);
            const DecodeResult closed = decode_resolvable(code, scenario);
            const DecodeResult oracle = oracle_decode(code, scenario);
            check.require(oracle.exact && closed.err_exact == oracle.err_exact,
                          "resolvable closed form equals the oracle");
            const auto profile = straggler_profile(code, scenario);
            bool complete = false;
            for (int entry : profile.counts) complete |= entry == 0;
            if (complete) check.require(closed.err_exact == 0, "a complete group means zero error");
            if (profile.counts == std::vector<int>{1, 1, 1, 1}) {
                check.require(closed.err_exact == 1, "the all-ones profile has unit error");
                for (const Rat& entry : closed.v_exact) {
                    check.require(entry == Rat(1, 3), "the all-ones profile weight is 1/3");
                }
            }
        });
    }
}

// ---- criterion 5: the projective-plane specialization -----------------------

void criterion_formula_consistency(Check& check) {
    for (int q : {2, 3, 4, 5, 7, 8, 9}) {
        const long long workers = static_cast<long long>(q) * q + q + 1;
        const long long load = q + 1;
        for (int count = 0; count < workers; ++count) {
            const Rat general =
                Rat(workers) - Rat(load * load) * (workers - count) / (load + (workers - count - 1));
            check.require(pg_error_formula(q, count) == general,
                          "specialized formula equals the general one (q=" + std::to_string(q) + ")");
        }
        check.require(pg_error_formula(q, q + 1) == 1,
                      "error is exactly 1 at one straggler per covering worker");
        check.require(Rat((q + 1) / load) == 1, "the coverage lower bound is also 1 there");
    }
}

// ---- criterion 6: the sweep curves ------------------------------------------

std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text) {
    std::vector<std::map<std::string, std::string>> rows;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::string field;
        std::istringstream line_in(line);
        while (std::getline(line_in, field, ',')) fields.push_back(field);
        if (header.empty()) {
            header = fields;
            continue;
        }
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < header.size() && i < fields.size(); ++i) row[header[i]] = fields[i];
        rows.push_back(std::move(row));
    }
    return rows;
}

void criterion_sweep_reproduction(Check& check) {
    for (int q : {5, 9}) {
        const std::string path = "acceptance_sweep_q" + std::to_string(q) + ".csv";
        const std::string command =
            std::string(GRADCODE_CLI_PATH) + " sweep --q " + std::to_string(q) + " --out " + path;
        check.require(std::system(command.c_str()) == 0, "sweep command succeeded");
        std::ifstream in(path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        std::remove(path.c_str());
        const auto rows = parse_csv(buffer.str());

        std::set<std::string> families;
        std::map<std::string, std::map<int, double>> series;  // family -> S -> err
        std::map<std::string, std::pair<int, int>> shape;     // family -> (N, L)
        for (const auto& row : rows) {
            families.insert(row.at("family"));
            series[row.at("family")][std::stoi(row.at("S"))] = std::stod(row.at("err"));
            shape[row.at("family")] = {std::stoi(row.at("N")), std::stoi(row.at("L"))};
        }
        check.require(families == std::set<std::string>{"pg", "dual-ag", "ag", "frc", "uncoded", "lower-bound"},
                      "all six series present (q=" + std::to_string(q) + ")");

        const int reference_load = q + 1;
        for (const std::string family : {"pg", "dual-ag", "ag"}) {
            const auto& curve = series[family];
            const auto [workers, load] = shape[family];
            for (const auto& [count, err] : curve) {
                check.require(err >= count / reference_load - 1e-9,
                              family + " stays above the coverage bound");
                if (count < static_cast<long long>(workers) * (load - 1) / load) {
                    check.require(err <= count + 1e-9, family + " stays below the uncoded line");
                }
                if (count >= 1 && count <= 2 * reference_load) {
                    const int steps = (count + reference_load - 1) / reference_load;
                    check.require(err <= 2.0 * steps + 1e-9,
                                  family + " stays within a factor two of the coverage bound");
                }
            }
        }
        const double frc_at_replication = series["frc"][reference_load];
        const double pg_at_replication = series["pg"][reference_load];
        if (q == 5) {
            check.require(frc_at_replication >= 3.0 * pg_at_replication,
                          "group-kill makes the repetition code at least 3x worse at S=R");
        }
    }
}

// ---- criterion 7: adversarial threshold -------------------------------------

void criterion_threshold(Check& check) {
    const GradientCode code = code_from_design(projective_geometry(2, 2));
    const ThresholdReport report = adversarial_threshold(code, 1);
    check.require(report.s_star == 3, "exhaustive threshold is 3");
    check.require(report.s_star_lb.has_value(), "spectral bound is available");
    const double expected_lb = (9.0 - std::sqrt(2.0)) / (3.0 + std::sqrt(2.0));
    check.require(std::abs(*report.s_star_lb - expected_lb) < 1e-9, "bound matches its formula");
    check.require(std::abs(*report.s_star_lb - 1.72) < 1e-2, "bound is approximately 1.72");
    check.require(*report.s_star_lb <= report.s_star, "bound is below the threshold");

    const SpectralSummary summary = spectral_summary(placement_graph(code));
    check.require(std::abs(summary.lambda2 - std::sqrt(2.0)) < 1e-9, "lambda2 is sqrt(2)");
    check.require(summary.hoholdt_bound.has_value() &&
                      std::abs(summary.lambda2 - *summary.hoholdt_bound) < 1e-9,
                  "lambda2 meets the degree bound with equality");
}

// ---- criterion 8: expansion sandwich ----------------------------------------

void criterion_expansion(Check& check) {
    const PlacementGraph graph = placement_graph(code_from_design(projective_geometry(2, 2)));
    const double h = expansion_constant(graph);
    const double lambda2 = spectral_summary(graph).lambda2;
    const double low = (3.0 - lambda2) / 2.0;
    const double high = std::sqrt(2.0 * 3.0 * (3.0 - lambda2));
    check.require(h >= low - 1e-12, "expansion is at least the spectral-gap half");
    check.require(h <= high + 1e-12, "expansion is at most the spectral upper bound");
    check.require(std::abs(low - 0.7929) < 1e-4 && std::abs(high - 3.0846) < 1e-3,
                  "sandwich endpoints sit where expected");
}

// ---- criterion 9: greedy adversary guarantee --------------------------------

void criterion_greedy_guarantee(Check& check) {
    std::vector<GradientCode> codes;
    codes.push_back(code_from_design(projective_geometry(2, 2)));   // 7
    codes.push_back(code_from_design(hadamard_design(3)));          // 11
    codes.push_back(code_from_design(projective_geometry(2, 3)));   // 13
    codes.push_back(code_from_design(hadamard_design(5)));          // 19
    codes.push_back(code_from_design(projective_geometry(2, 4)));   // 21
    codes.push_back(code_from_design(hadamard_design(6)));          // 23
    codes.push_back(code_from_design(hadamard_design(7)));          // 27
    codes.push_back(code_from_design(projective_geometry(2, 5)));   // 31
    codes.push_back(code_from_design(hadamard_design(8)));          // 31
    for (const GradientCode& code : codes) {
        for (int budget : {code.load, 2 * code.load}) {
            const GreedyAttack attack = greedy_adversary(code, budget);
            const DecodeResult decoded = oracle_decode(code, attack.scenario);
            check.require(decoded.exact && decoded.err_exact >= budget / code.load,
                          "greedy attack reaches floor(S/L) on " + std::to_string(code.workers) +
                              " workers with budget " + std::to_string(budget));
        }
    }
}

// ---- criterion 10: the descent pipeline -------------------------------------

void criterion_sgd_pipeline(Check& check) {
    const GradientCode fano = code_from_design(projective_geometry(2, 2));

    // exact zero-straggler recovery on integer data
    std::vector<std::vector<Int>> partials(4, std::vector<Int>(7));
    for (int row = 0; row < 4; ++row) {
        for (int part = 0; part < 7; ++part) partials[row][part] = Int(3 * row - 2 * part + 1);
    }
    const ExactRound exact = exact_coded_round(fano, partials, StragglerScenario::from_stragglers(7, {}));
    check.require(exact.exact_match && exact.err == 0, "zero stragglers recover the scaled sum exactly");

    // deviation bound across 100 seeded trials
    int held = 0;
    for (int seed = 0; seed < 100; ++seed) {
        const SyntheticDataset dataset = make_dataset(63, 5, 7, 0.5, 1000 + seed);
        const GradientRound round = coded_round(fano, dataset, Eigen::VectorXd::Zero(5),
                                                random_stragglers(7, 2, seed));
        held += round.bound_holds;
    }
    check.require(held == 100, "the deviation bound held in " + std::to_string(held) + "/100 trials");

    // paired run under a budgeted adversary
    const SyntheticDataset dataset = make_dataset(63, 5, 7, 0.5, 1);
    const auto coded = run_sgd(fano, dataset, {SgdPolicy::Kind::Greedy, 2, 0}, 500, 0.001);
    const auto plain = run_sgd(uncoded_code(7), dataset, {SgdPolicy::Kind::Greedy, 2, 0}, 500, 0.001);
    check.require(coded.back().loss < plain.back().loss,
                  "coded run ends strictly below the uncoded run");
}

// ---- criterion 11: rank-one inverse updates ----------------------------------

void criterion_rank_one_updates(Check& check) {
    std::srand(1729);
    int accepted = 0;
    while (accepted < 100) {
        const int n = 2 + std::rand() % 6;
        const Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
        const Eigen::MatrixXd g = a * a.transpose() + n * Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd h = Eigen::VectorXd::Random(n) * Eigen::RowVectorXd::Random(n);
        const Eigen::MatrixXd g_inverse = g.inverse();
        if (std::abs(1.0 + (h * g_inverse).trace()) < 1e-3) continue;
        const Eigen::MatrixXd updated = rank_one_update_inverse(g_inverse, h);
        const double defect = ((g + h) * updated - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
        check.require(defect < 1e-12, "update inverts to 1e-12");
        ++accepted;
    }
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* label;
        double budget_seconds;
        std::function<void(Check&)> body;
    };
    const std::vector<Criterion> criteria = {
        {1, "design constructions verify their closed-form parameters", 10.0, criterion_design_axioms},
        {2, "symmetric closed-form decoding equals the exact oracle", 5.0, criterion_symmetric_equivalence},
        {3, "dual closed-form decoding equals the exact oracle", 5.0, criterion_dual_equivalence},
        {4, "resolvable closed-form decoding equals the exact oracle", 30.0, criterion_resolvable_equivalence},
        {5, "projective-plane error formula matches the general form", 30.0, criterion_formula_consistency},
        {6, "sweep curves sit between the bounds", 10.0, criterion_sweep_reproduction},
        {7, "adversarial threshold and its spectral bound", 5.0, criterion_threshold},
        {8, "expansion constant inside the spectral sandwich", 60.0, criterion_expansion},
        {9, "greedy adversary reaches the coverage floor", 10.0, criterion_greedy_guarantee},
        {10, "coded descent pipeline", 30.0, criterion_sgd_pipeline},
        {11, "rank-one inverse updates", 10.0, criterion_rank_one_updates},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.body(check);
        } catch (const std::exception& e) {
            check.failures.push_back(std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > criterion.budget_seconds) {
            check.failures.push_back("exceeded the " + std::to_string(criterion.budget_seconds) +
                                     "s budget");
        }
        if (check.failures.empty()) {
            std::printf("PASS  %2d  %s (%.2fs)\n", criterion.id, criterion.label, elapsed);
        } else {
            ++failures;
            std::printf("FAIL  %2d  %s (%.2fs): %s\n", criterion.id, criterion.label, elapsed,
                        check.failures.front().c_str());
        }
    }
    return failures == 0 ? 0 : 1;
}
