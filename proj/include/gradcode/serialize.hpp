#pragma once

#include "gradcode/code.hpp"
#include "gradcode/decode.hpp"
#include "gradcode/design.hpp"
#include "gradcode/straggler.hpp"

#include <json.hpp>

#include <cstdio>
#include <string>

namespace gradcode {

/// Formats with 12 significant digits ("%.12g"); shared by the CSV and JSON
/// writers so outputs are byte-reproducible.
inline std::string format_sig12(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

/// The same rounding as format_sig12, as a double for JSON number fields.
inline double round_sig12(double value) {
    return std::strtod(format_sig12(value).c_str(), nullptr);
}

inline nlohmann::json to_json(const BIBDParams& params) {
    return {{"v", params.points},
            {"b", params.blocks},
            {"k", params.block_size},
            {"r", params.replication},
            {"lambda", params.lambda}};
}

inline nlohmann::json to_json(const Design& design) {
    nlohmann::json out{{"v", design.v}, {"b", design.b()}, {"blocks", design.blocks}};
    if (design.params) out["params"] = to_json(*design.params);
    return out;
}

inline Design design_from_json(const nlohmann::json& json) {
    Design design = design_from_blocks(json.at("v").get<int>(),
                                       json.at("blocks").get<std::vector<std::vector<int>>>());
    if (json.contains("params")) verify_bibd(design);
    return design;
}

inline nlohmann::json to_json(const GradientCode& code) {
    nlohmann::json out{{"N", code.workers},
                       {"K", code.parts},
                       {"L", code.load},
                       {"R", code.replication},
                       {"kind", kind_name(code.kind)}};
    std::vector<std::string> rows;
    rows.reserve(code.parts);
    for (int i = 0; i < code.parts; ++i) {
        std::string row(code.workers, '0');
        for (int j = 0; j < code.workers; ++j) {
            if (code.encoding(i, j) != 0) row[j] = '1';
        }
        rows.push_back(std::move(row));
    }
    out["E"] = rows;
    if (code.kind == CodeKind::SymmetricBibd || code.kind == CodeKind::DualBibd) out["lambda"] = code.lambda;
    if (code.kind == CodeKind::AffineResolvable) {
        out["mu"] = code.mu;
        out["groups"] = code.groups;
    }
    if (code.kind == CodeKind::Frc) out["group_size"] = code.group_size;
    return out;
}

inline GradientCode code_from_json(const nlohmann::json& json) {
    const auto rows = json.at("E").get<std::vector<std::string>>();
    const int parts = static_cast<int>(rows.size());
    const int workers = parts == 0 ? 0 : static_cast<int>(rows[0].size());
    Eigen::MatrixXi encoding = Eigen::MatrixXi::Zero(parts, workers);
    for (int i = 0; i < parts; ++i) {
        for (int j = 0; j < workers; ++j) encoding(i, j) = rows[i][j] == '1' ? 1 : 0;
    }
    GradientCode code = custom_code(std::move(encoding));
    const std::string kind = json.at("kind").get<std::string>();
    for (CodeKind candidate : {CodeKind::SymmetricBibd, CodeKind::DualBibd, CodeKind::AffineResolvable,
                               CodeKind::Frc, CodeKind::Uncoded, CodeKind::Custom}) {
        if (kind == kind_name(candidate)) code.kind = candidate;
    }
    if (json.contains("lambda")) code.lambda = json["lambda"].get<long long>();
    if (json.contains("mu")) code.mu = json["mu"].get<long long>();
    if (json.contains("group_size")) code.group_size = json["group_size"].get<int>();
    if (json.contains("groups")) code.groups = json["groups"].get<std::vector<std::vector<int>>>();
    return code;
}

inline nlohmann::json to_json(const DecodeResult& result, const StragglerScenario& scenario,
                              const std::vector<int>* profile = nullptr) {
    nlohmann::json err{{"float", round_sig12(result.err)}};
    if (result.exact) err["exact"] = rat_string(result.err_exact);
    nlohmann::json out{{"S", scenario.straggler_count()},
                       {"err", err},
                       {"method", method_name(result.method)}};
    std::vector<double> v(result.v.size());
    for (int i = 0; i < result.v.size(); ++i) v[i] = round_sig12(result.v(i));
    out["v_opt"] = v;
    if (profile) out["profile"] = *profile;
    return out;
}

inline nlohmann::json to_json(const ThresholdReport& report) {
    nlohmann::json out{{"eta", report.eta},
                       {"S_star", report.s_star},
                       {"witness_gradients", report.witness_gradients},
                       {"witness_workers", report.witness_workers}};
    if (report.s_star_lb) out["S_star_lb"] = round_sig12(*report.s_star_lb);
    if (report.lambda2) out["lambda2"] = round_sig12(*report.lambda2);
    return out;
}

}  // namespace gradcode
