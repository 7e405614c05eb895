// Command-line frontend: build design-based gradient codes, sweep worst-case
// error curves, tabulate adversarial thresholds, and run the coded-descent
// demo. Outputs are deterministic for fixed flags and seed.

#include "gradcode/serialize.hpp"
#include "gradcode/sgd.hpp"
#include "gradcode/straggler.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace gradcode;

struct BuiltFamily {
    GradientCode code;
    std::optional<Design> design;
};

// hadamard takes its size from m (order 4m-1); everything else is driven by q
BuiltFamily build_family(const std::string& family, int q, int m) {
    if (family == "pg") {
        Design design = projective_geometry(m, q);
        GradientCode code = code_from_design(design);
        return {std::move(code), std::move(design)};
    }
    if (family == "ag") {
        auto [design, resolution] = affine_geometry(m, q);
        GradientCode code = code_from_design(design, {.resolution = &resolution});
        return {std::move(code), std::move(design)};
    }
    if (family == "dual-ag") {
        auto [design, resolution] = affine_geometry(m, q);
        GradientCode code = code_from_design(design, {.dual = true});
        return {std::move(code), std::move(design)};
    }
    if (family == "hadamard") {
        Design design = hadamard_design(m);
        GradientCode code = code_from_design(design);
        return {std::move(code), std::move(design)};
    }
    if (family == "frc") return {frc_code((q + 1) * (q + 1), q + 1), std::nullopt};
    if (family == "uncoded") return {uncoded_code(q * q + q + 1), std::nullopt};
    throw Error("unknown family: " + family);
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + out_path);
    out << text;
}

struct SweepRow {
    std::string family;
    int q = 0;
    int workers = 0;
    int parts = 0;
    int load = 0;
    int stragglers = 0;
    Rat err;
    bool exact = true;
    double err_float = 0.0;
    std::string method;
};

// One curve: worst-case error against the straggler count for a single family.
std::vector<SweepRow> sweep_family(const std::string& family, int q, int m, int s_min, int s_max,
                                   const std::string& policy, std::uint64_t seed) {
    std::vector<SweepRow> rows;

    if (family == "lower-bound") {
        // reference floor(S / (q+1)) series on the symmetric footprint
        const int workers = q * q + q + 1;
        const int load = q + 1;
        const int high = s_max < 0 ? workers - 1 : std::min(s_max, workers - 1);
        for (int count = std::max(0, s_min); count <= high; ++count) {
            SweepRow row{family, q, workers, workers, load, count, Rat(count / load), true, 0.0, "lower-bound"};
            row.err_float = to_double(row.err);
            rows.push_back(row);
        }
        return rows;
    }

    const BuiltFamily built = build_family(family, q, m);
    const GradientCode& code = built.code;
    const int high = s_max < 0 ? code.workers - 1 : std::min(s_max, code.workers - 1);

    for (int count = std::max(0, s_min); count <= high; ++count) {
        SweepRow row;
        row.family = family;
        row.q = q;
        row.workers = code.workers;
        row.parts = code.parts;
        row.load = code.load;
        row.stragglers = count;

        if (policy == "none") {
            switch (code.kind) {
                case CodeKind::SymmetricBibd:
                case CodeKind::DualBibd:
                case CodeKind::AffineResolvable: {
                    const WorstCase worst = worst_case_error(code, count, WorstCaseMethod::ClosedForm);
                    row.err = worst.err_exact;
                    row.method = "closed-form";
                    break;
                }
                case CodeKind::Frc:
                    // killing whole groups is optimal for the repetition code
                    row.err = Rat(code.load) * (count / code.replication);
                    row.method = "formula";
                    break;
                case CodeKind::Uncoded:
                    row.err = count;
                    row.method = "formula";
                    break;
                default:
                    throw MethodUnavailable("no worst-case formula for custom codes");
            }
        } else if (policy == "exhaustive") {
            const WorstCase worst = worst_case_error(code, count, WorstCaseMethod::Exhaustive);
            row.err = worst.err_exact;
            row.exact = worst.exact;
            row.err_float = worst.err;
            row.method = "exhaustive";
        } else if (policy == "greedy") {
            const DecodeResult decoded = oracle_decode(code, greedy_scenario_with_budget(code, count));
            row.err = decoded.err_exact;
            row.exact = decoded.exact;
            row.err_float = decoded.err;
            row.method = "greedy";
        } else if (policy == "random") {
            const DecodeResult decoded =
                oracle_decode(code, random_stragglers(code.workers, count, seed + static_cast<std::uint64_t>(count)));
            row.err = decoded.err_exact;
            row.exact = decoded.exact;
            row.err_float = decoded.err;
            row.method = "random";
        } else {
            throw Error("unknown policy: " + policy);
        }
        if (row.exact) row.err_float = to_double(row.err);

        // worst-case curves stay between floor(S/(q+1)) and the uncoded line
        if (policy == "none" &&
            (family == "pg" || family == "dual-ag" || family == "ag" || family == "hadamard")) {
            const int reference_load = family == "hadamard" ? code.load : q + 1;
            if (row.err < count / reference_load) {
                throw Error("worst-case curve dipped below the coverage lower bound");
            }
            if (count < static_cast<long long>(code.workers) * (code.load - 1) / code.load &&
                row.err > count) {
                throw Error("worst-case curve exceeded the uncoded line");
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "family,q,N,K,L,S,S_over_N,err,err_over_K,method\n";
    for (const SweepRow& row : rows) {
        out << row.family << ',' << row.q << ',' << row.workers << ',' << row.parts << ',' << row.load
            << ',' << row.stragglers << ',' << format_sig12(static_cast<double>(row.stragglers) / row.workers)
            << ',' << format_sig12(row.err_float) << ',' << format_sig12(row.err_float / row.parts) << ','
            << row.method << '\n';
    }
    return out.str();
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const SweepRow& row : rows) {
        nlohmann::json err{{"float", round_sig12(row.err_float)}};
        if (row.exact) err["exact"] = rat_string(row.err);
        out.push_back({{"family", row.family},
                       {"q", row.q},
                       {"N", row.workers},
                       {"K", row.parts},
                       {"L", row.load},
                       {"S", row.stragglers},
                       {"S_over_N", round_sig12(static_cast<double>(row.stragglers) / row.workers)},
                       {"err", err},
                       {"err_over_K", round_sig12(row.err_float / row.parts)},
                       {"method", row.method}});
    }
    return out.dump(2) + "\n";
}

int run_build(const std::string& family, int q, int m, const std::string& out_path,
              bool dump_design) {
    const BuiltFamily built = build_family(family, q, m);
    const GradientCode& code = built.code;
    std::ostringstream summary;
    summary << "N=" << code.workers << " K=" << code.parts << " L=" << code.load
            << " R=" << code.replication << " kind=" << kind_name(code.kind) << '\n';
    std::cout << summary.str();

    nlohmann::json payload;
    if (dump_design) {
        if (!built.design) throw Error("family " + family + " is not design-backed");
        payload = to_json(*built.design);
    } else {
        payload = to_json(code);
    }
    if (!out_path.empty()) write_output(out_path, payload.dump(2) + "\n");
    return 0;
}

int run_sweep(const std::string& family, int q, int m, int s_min, int s_max,
              const std::string& policy, std::uint64_t seed, const std::string& out_path,
              const std::string& format) {
    std::vector<SweepRow> rows;
    if (family == "all") {
        for (const char* series : {"pg", "dual-ag", "ag", "frc", "uncoded", "lower-bound"}) {
            const auto part = sweep_family(series, q, m, s_min, s_max, policy, seed);
            rows.insert(rows.end(), part.begin(), part.end());
        }
    } else {
        rows = sweep_family(family, q, m, s_min, s_max, policy, seed);
    }
    write_output(out_path, format == "json" ? sweep_json(rows) : sweep_csv(rows));
    return 0;
}

int run_threshold(const std::string& family, int q, int m, int eta_min, int eta_max,
                  const std::string& out_path, const std::string& format) {
    const BuiltFamily built = build_family(family, q, m);
    const GradientCode& code = built.code;
    if (eta_max < 0) eta_max = std::min(code.parts - 1, std::max(1, code.workers / 4));
    if (eta_min < 1) throw Error("eta must be at least 1");

    std::vector<ThresholdReport> reports;
    for (int eta = eta_min; eta <= eta_max && eta < code.parts; ++eta) {
        reports.push_back(adversarial_threshold(code, eta));
    }

    if (format == "json") {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& report : reports) out.push_back(to_json(report));
        write_output(out_path, out.dump(2) + "\n");
        return 0;
    }

    std::ostringstream out;
    out << "eta,S_star,S_star_lb,lambda2,witness,note\n";
    for (const auto& report : reports) {
        out << report.eta << ',' << report.s_star << ',';
        if (report.s_star_lb) out << format_sig12(*report.s_star_lb);
        out << ',';
        if (report.lambda2) out << format_sig12(*report.lambda2);
        out << ',';
        out << '[';
        for (std::size_t i = 0; i < report.witness_gradients.size(); ++i) {
            if (i) out << ';';
            out << report.witness_gradients[i];
        }
        out << "],";
        if (!report.s_star_lb) out << "not-in-class-C";
        out << '\n';
    }
    write_output(out_path, out.str());
    return 0;
}

int run_decode(const std::string& family, int q, int m, const std::vector<int>& straggler_set,
               int stragglers, const std::string& policy, std::uint64_t seed,
               const std::string& out_path) {
    const BuiltFamily built = build_family(family, q, m);
    const GradientCode& code = built.code;

    StragglerScenario scenario;
    if (!straggler_set.empty()) {
        scenario = StragglerScenario::from_stragglers(code.workers, straggler_set);
    } else if (policy == "random") {
        scenario = random_stragglers(code.workers, stragglers, seed);
    } else if (policy == "greedy") {
        scenario = greedy_scenario_with_budget(code, stragglers);
    } else if (policy == "none") {
        scenario = StragglerScenario::from_stragglers(code.workers, {});
    } else {
        throw Error("decode supports policies none, random, greedy");
    }

    const DecodeResult result = decode_auto(code, scenario);
    std::optional<std::vector<int>> profile;
    if (code.kind == CodeKind::AffineResolvable) profile = straggler_profile(code, scenario).counts;
    const nlohmann::json payload = to_json(result, scenario, profile ? &*profile : nullptr);
    write_output(out_path, payload.dump(2) + "\n");
    return 0;
}

int run_demo(const std::string& family, int q, int m, int stragglers, const std::string& policy,
             std::uint64_t seed, int steps, double alpha, double sigma, int samples_per_part,
             int dim, const std::string& out_path) {
    const BuiltFamily built = build_family(family, q, m);
    const GradientCode& code = built.code;
    const GradientCode baseline = uncoded_code(code.parts);

    SgdPolicy sgd_policy;
    if (policy == "none") {
        sgd_policy.kind = SgdPolicy::Kind::None;
    } else if (policy == "random") {
        sgd_policy.kind = SgdPolicy::Kind::Random;
    } else if (policy == "greedy") {
        sgd_policy.kind = SgdPolicy::Kind::Greedy;
    } else {
        throw Error("sgd-demo supports policies none, random, greedy");
    }
    sgd_policy.stragglers = stragglers;
    sgd_policy.seed = seed;

    const SyntheticDataset dataset = make_dataset(samples_per_part * code.parts, dim, code.parts, sigma, seed);
    const auto coded = run_sgd(code, dataset, sgd_policy, steps, alpha);
    const auto plain = run_sgd(baseline, dataset, sgd_policy, steps, alpha);

    std::ostringstream out;
    out << "step,loss_coded,err_coded,grad_dev_coded,loss_uncoded,err_uncoded,grad_dev_uncoded\n";
    for (int step = 0; step < steps; ++step) {
        out << step << ',' << format_sig12(coded[step].loss) << ',' << format_sig12(coded[step].err)
            << ',' << format_sig12(coded[step].deviation) << ',' << format_sig12(plain[step].loss)
            << ',' << format_sig12(plain[step].err) << ',' << format_sig12(plain[step].deviation)
            << '\n';
    }
    write_output(out_path, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient codes from block designs: construction, decoding, and adversarial analysis"};
    app.require_subcommand(1);

    const std::vector<std::string> families = {"pg", "ag", "dual-ag", "hadamard", "frc", "uncoded"};
    std::vector<std::string> sweep_families = families;
    sweep_families.push_back("all");
    sweep_families.push_back("lower-bound");

    struct BuildArgs {
        std::string family = "pg";
        int q = 2;
        int m = 2;
        std::string out_path;
        bool dump_design = false;
    } build_args;
    CLI::App* build = app.add_subcommand("build", "construct a code and print its parameters");
    build->add_option("--family", build_args.family)->check(CLI::IsMember(families));
    build->add_option("--q", build_args.q, "field order for pg/ag/dual-ag, curve parameter for frc/uncoded");
    build->add_option("--m", build_args.m, "geometry dimension; hadamard order is 4m-1");
    build->add_option("--out", build_args.out_path);
    build->add_flag("--dump-design", build_args.dump_design, "emit the block design instead of the code");

    struct SweepArgs {
        std::string family = "all";
        int q = 5;
        int m = 2;
        int s_min = 0;
        int s_max = -1;
        std::string policy = "none";
        std::uint64_t seed = 1;
        std::string out_path;
        std::string format = "csv";
    } sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "worst-case error against the straggler count");
    sweep->add_option("--family", sweep_args.family)->check(CLI::IsMember(sweep_families));
    sweep->add_option("--q", sweep_args.q);
    sweep->add_option("--m", sweep_args.m);
    sweep->add_option("--s-min", sweep_args.s_min);
    sweep->add_option("--s-max", sweep_args.s_max);
    sweep->add_option("--policy", sweep_args.policy)
        ->check(CLI::IsMember({"none", "random", "greedy", "exhaustive"}));
    sweep->add_option("--seed", sweep_args.seed);
    sweep->add_option("--out", sweep_args.out_path);
    sweep->add_option("--format", sweep_args.format)->check(CLI::IsMember({"csv", "json"}));

    struct ThresholdArgs {
        std::string family = "pg";
        int q = 2;
        int m = 2;
        int eta_min = 1;
        int eta_max = -1;
        std::string out_path;
        std::string format = "csv";
    } threshold_args;
    CLI::App* threshold = app.add_subcommand("threshold", "adversarial thresholds with spectral bounds");
    threshold->add_option("--family", threshold_args.family)->check(CLI::IsMember(families));
    threshold->add_option("--q", threshold_args.q);
    threshold->add_option("--m", threshold_args.m);
    threshold->add_option("--s-min", threshold_args.eta_min, "lowest eta");
    threshold->add_option("--s-max", threshold_args.eta_max, "highest eta; default N/4 capped at K-1");
    threshold->add_option("--out", threshold_args.out_path);
    threshold->add_option("--format", threshold_args.format)->check(CLI::IsMember({"csv", "json"}));

    struct DecodeArgs {
        std::string family = "pg";
        int q = 2;
        int m = 2;
        std::vector<int> straggler_set;
        int stragglers = 0;
        std::string policy = "none";
        std::uint64_t seed = 1;
        std::string out_path;
    } decode_args;
    CLI::App* decode = app.add_subcommand("decode", "decoding vector and error for one straggler set");
    decode->add_option("--family", decode_args.family)->check(CLI::IsMember(families));
    decode->add_option("--q", decode_args.q);
    decode->add_option("--m", decode_args.m);
    decode->add_option("--set", decode_args.straggler_set, "explicit straggler indices")
        ->delimiter(',');
    decode->add_option("--stragglers", decode_args.stragglers, "straggler count for random/greedy");
    decode->add_option("--policy", decode_args.policy)->check(CLI::IsMember({"none", "random", "greedy"}));
    decode->add_option("--seed", decode_args.seed);
    decode->add_option("--out", decode_args.out_path);

    struct DemoArgs {
        std::string family = "pg";
        int q = 2;
        int m = 2;
        int stragglers = 2;
        std::string policy = "greedy";
        std::uint64_t seed = 1;
        int steps = 500;
        double alpha = 0.001;
        double sigma = 0.5;
        int samples_per_part = 9;
        int dim = 5;
        std::string out_path;
    } demo_args;
    CLI::App* demo = app.add_subcommand("sgd-demo", "paired coded-vs-uncoded descent trajectories");
    demo->add_option("--family", demo_args.family)->check(CLI::IsMember(families));
    demo->add_option("--q", demo_args.q);
    demo->add_option("--m", demo_args.m);
    demo->add_option("--stragglers", demo_args.stragglers);
    demo->add_option("--policy", demo_args.policy)->check(CLI::IsMember({"none", "random", "greedy"}));
    demo->add_option("--seed", demo_args.seed);
    demo->add_option("--steps", demo_args.steps)->check(CLI::PositiveNumber);
    demo->add_option("--alpha", demo_args.alpha);
    demo->add_option("--sigma", demo_args.sigma);
    demo->add_option("--samples-per-part", demo_args.samples_per_part)->check(CLI::PositiveNumber);
    demo->add_option("--dim", demo_args.dim)->check(CLI::PositiveNumber);
    demo->add_option("--out", demo_args.out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (build->parsed()) {
            return run_build(build_args.family, build_args.q, build_args.m, build_args.out_path,
                             build_args.dump_design);
        }
        if (sweep->parsed()) {
            return run_sweep(sweep_args.family, sweep_args.q, sweep_args.m, sweep_args.s_min,
                             sweep_args.s_max, sweep_args.policy, sweep_args.seed, sweep_args.out_path,
                             sweep_args.format);
        }
        if (threshold->parsed()) {
            if (threshold_args.eta_min < 1 ||
                (threshold_args.eta_max >= 0 && threshold_args.eta_max < threshold_args.eta_min)) {
                std::cerr << "usage error: eta range must start at 1\n";
                return 2;
            }
            return run_threshold(threshold_args.family, threshold_args.q, threshold_args.m,
                                 threshold_args.eta_min, threshold_args.eta_max, threshold_args.out_path,
                                 threshold_args.format);
        }
        if (decode->parsed()) {
            return run_decode(decode_args.family, decode_args.q, decode_args.m,
                              decode_args.straggler_set, decode_args.stragglers, decode_args.policy,
                              decode_args.seed, decode_args.out_path);
        }
        if (demo->parsed()) {
            return run_demo(demo_args.family, demo_args.q, demo_args.m, demo_args.stragglers,
                            demo_args.policy, demo_args.seed, demo_args.steps, demo_args.alpha,
                            demo_args.sigma, demo_args.samples_per_part, demo_args.dim,
                            demo_args.out_path);
        }
    } catch (const gradcode::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
