#include "gradcode/serialize.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gradcode;

TEST_CASE("design round trip") {
    Design design = projective_geometry(2, 3);
    const nlohmann::json json = to_json(design);
    CHECK(json["v"] == 13);
    CHECK(json["b"] == 13);
    CHECK(json["params"]["lambda"] == 1);

    const Design back = design_from_json(json);
    CHECK(back.v == design.v);
    CHECK(back.blocks == design.blocks);
    CHECK(back.incidence == design.incidence);
    CHECK(back.params == design.params);
}

TEST_CASE("code round trip keeps the encoding and the kind metadata") {
    auto [ag, resolution] = affine_geometry(2, 3);
    const GradientCode code = code_from_design(ag, {.resolution = &resolution});
    const nlohmann::json json = to_json(code);
    CHECK(json["N"] == 12);
    CHECK(json["K"] == 9);
    CHECK(json["E"].size() == 9);
    CHECK(json["E"][0].get<std::string>().size() == 12);
    CHECK(json["mu"] == 1);

    const GradientCode back = code_from_json(json);
    CHECK(back.encoding == code.encoding);
    CHECK(back.kind == code.kind);
    CHECK(back.groups == code.groups);
    CHECK(back.load == code.load);
    CHECK(back.replication == code.replication);

    const GradientCode frc = frc_code(9, 3);
    const GradientCode frc_back = code_from_json(to_json(frc));
    CHECK(frc_back.encoding == frc.encoding);
    CHECK(frc_back.kind == CodeKind::Frc);
    CHECK(frc_back.group_size == 3);
}

TEST_CASE("decode results serialize exact rationals alongside floats") {
    const GradientCode code = code_from_design(projective_geometry(2, 2));
    const auto scenario = StragglerScenario::from_stragglers(7, {0, 3});
    const nlohmann::json json = to_json(decode_symmetric(code, scenario), scenario);
    CHECK(json["S"] == 2);
    CHECK(json["err"]["exact"] == "4/7");
    CHECK(json["err"]["float"].get<double>() == Catch::Approx(4.0 / 7.0).epsilon(1e-11));
    CHECK(json["method"] == "thm1");
    CHECK(json["v_opt"].size() == 5);
    CHECK(json["v_opt"][0].get<double>() == Catch::Approx(3.0 / 7.0).epsilon(1e-11));
}

TEST_CASE("threshold reports serialize integers exactly and floats at 12 digits") {
    const GradientCode code = code_from_design(projective_geometry(2, 2));
    const ThresholdReport report = adversarial_threshold(code, 1);
    const nlohmann::json json = to_json(report);
    CHECK(json["S_star"] == 3);
    CHECK(json["S_star_lb"].get<double>() == Catch::Approx(1.71849103593).epsilon(1e-11));
    CHECK(json["lambda2"].get<double>() == Catch::Approx(1.41421356237).epsilon(1e-11));
    CHECK(json["witness_workers"].size() == 3);
}

TEST_CASE("twelve-significant-digit formatting") {
    CHECK(format_sig12(0.0) == "0");
    CHECK(format_sig12(1.0) == "1");
    CHECK(format_sig12(4.0 / 7.0) == "0.571428571429");
    CHECK(format_sig12(1.0 / 31.0) == "0.0322580645161");
    CHECK(rat_string(Rat(4, 7)) == "4/7");
    CHECK(rat_string(Rat(2)) == "2/1");
    CHECK(rat_string(Rat(-3, 9)) == "-1/3");
}
