#include <catch2/catch_amalgamated.hpp>

#include "qrrt/json_report.hpp"

using namespace qrrt;

namespace {

bool reports_equal(const VerificationReport& x, const VerificationReport& y) {
    if (x.target != y.target || x.status != y.status ||
        x.checked_q_order != y.checked_q_order || x.checked_a_order != y.checked_a_order ||
        x.elapsed_ms != y.elapsed_ms ||
        x.first_divergence.has_value() != y.first_divergence.has_value())
        return false;
    if (x.first_divergence) {
        const auto& a = *x.first_divergence;
        const auto& b = *y.first_divergence;
        return a.location == b.location && a.a_exp == b.a_exp && a.q_exp == b.q_exp &&
               a.lhs_coeff == b.lhs_coeff && a.rhs_coeff == b.rhs_coeff;
    }
    return true;
}

}  // namespace

TEST_CASE("empty report list") {
    CHECK(emit_json({}) == R"({"version":1,"reports":[]})");
    CHECK(parse_json_reports(R"({"version":1,"reports":[]})").empty());
}

TEST_CASE("a passing report has no first_divergence key") {
    VerificationReport r;
    r.target = "rr1";
    r.checked_q_order = 100;
    r.elapsed_ms = 7;
    std::string j = emit_json({r});
    CHECK(j ==
          R"({"version":1,"reports":[{"name":"rr1","status":"pass","q_order":100,)"
          R"("a_order":null,"elapsed_ms":7}]})");
    CHECK(j.find("first_divergence") == std::string::npos);
}

TEST_CASE("a failing report carries all five divergence fields") {
    VerificationReport r;
    r.target = "mod18";
    r.checked_q_order = 40;
    r.checked_a_order = 10;
    r.record_divergence("lhs vs rhs", Divergence{2, 17, Int("123456789012345678901234567890"),
                                                 Int("-5")});
    r.elapsed_ms = 3;
    std::string j = emit_json({r});
    CHECK(j.find("\"status\":\"fail\"") != std::string::npos);
    CHECK(j.find("\"a_order\":10") != std::string::npos);
    CHECK(j.find("\"location\":\"lhs vs rhs\"") != std::string::npos);
    CHECK(j.find("\"a_exp\":2") != std::string::npos);
    CHECK(j.find("\"q_exp\":17") != std::string::npos);
    CHECK(j.find("\"lhs_coeff\":123456789012345678901234567890") != std::string::npos);
    CHECK(j.find("\"rhs_coeff\":-5") != std::string::npos);
}

TEST_CASE("JSON round-trips exactly") {
    VerificationReport pass;
    pass.target = "slater-44";
    pass.checked_q_order = 100;
    pass.elapsed_ms = 12;

    VerificationReport fail;
    fail.target = "it\"has\\odd\nchars";
    fail.checked_q_order = 60;
    fail.checked_a_order = 20;
    fail.record_divergence("i=2 relation", Divergence{-1, 33, Int("99999999999999999999999"),
                                                      Int(0)});
    fail.elapsed_ms = 250;

    VerificationReport amb;
    amb.target = "maybe";
    amb.status = Status::Ambiguous;
    amb.checked_q_order = 5;

    std::vector<VerificationReport> in{pass, fail, amb};
    auto out = parse_json_reports(emit_json(in));
    REQUIRE(out.size() == in.size());
    for (size_t i = 0; i < in.size(); ++i) {
        INFO("report " << i);
        CHECK(reports_equal(in[i], out[i]));
    }
    // idempotent: emit(parse(emit(x))) == emit(x)
    CHECK(emit_json(out) == emit_json(in));
}

TEST_CASE("malformed documents are rejected") {
    CHECK_THROWS_AS(parse_json_reports(""), ValidationError);
    CHECK_THROWS_AS(parse_json_reports(R"({"reports":[]})"), ValidationError);
    CHECK_THROWS_AS(parse_json_reports(R"({"version":2,"reports":[]})"), ValidationError);
    CHECK_THROWS_AS(parse_json_reports(R"({"version":1,"reports":[]} extra)"), ValidationError);
    CHECK_THROWS_AS(parse_json_reports(R"({"version":1,"reports":[{"name":"x","bogus":1}]})"),
                    ValidationError);
}
