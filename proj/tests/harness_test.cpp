#include "harnack/config.hpp"
#include "harnack/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace harnack;

namespace {

const char* kConstant = R"(
[manifold]
dim = 1
lengths = ["2*pi"]
counts = [16]

[initial]
w0 = "1"

[solver]
t_end = 0.5
snapshot_count = 11
)";

std::string with_checks(const std::string& base, const std::string& checks) { return base + "\n" + checks; }

std::vector<std::string> errors_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.errors();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v) {
        if (s.find(needle) != std::string::npos) return true;
    }
    return false;
}

const ConvergenceTable& table(const ReportBundle& b, const std::string& quantity) {
    for (const auto& t : b.convergence) {
        if (t.quantity == quantity) return t;
    }
    throw std::runtime_error("no table " + quantity);
}

}  // namespace

TEST(Config, MinimalHeatScenario) {
    const Scenario s = parse_config_text(kConstant, "c");
    EXPECT_EQ(s.name, "c");
    EXPECT_TRUE(std::holds_alternative<nl::Zero>(s.nonlinearity));
    EXPECT_NEAR(s.manifold.lengths[0], 2.0 * std::numbers::pi, 1e-15);
    EXPECT_EQ(s.output_times().size(), 11u);
    EXPECT_TRUE(s.checks.empty());
}

TEST(Config, SyntaxErrorsCarryLineNumbers) {
    const auto errors = errors_of("[manifold]\ndim = 1\nthis line is wrong\n[solver]\nt_end = 1\nt_end = 2\n");
    EXPECT_TRUE(any_contains(errors, "line 3"));
    EXPECT_TRUE(any_contains(errors, "line 6"));
}

TEST(Config, CollectsEveryValidationError) {
    const auto errors = errors_of(with_checks(kConstant, R"(
[checks.li_yau_global]
alpha = 1

[checks.hessian_global]
beta = 0.5
delta = 0.5

[checks.no_such_check]

[weight]
colour = "red"
)"));
    EXPECT_GE(errors.size(), 4u);
    EXPECT_TRUE(any_contains(errors, "alpha > 1 required"));
    EXPECT_TRUE(any_contains(errors, "beta >= sqrt(delta/(1-delta)) = 1"));
    EXPECT_TRUE(any_contains(errors, "no_such_check"));
    EXPECT_TRUE(any_contains(errors, "colour"));
}

TEST(Config, RejectsNonSnakeCaseAndBadExpressions) {
    const auto errors = errors_of(std::string(kConstant) + "\n[weight]\nF = \"x\"\n[potential]\nq = \"sin(\"\n");
    EXPECT_GE(errors.size(), 2u);
}

TEST(Config, RejectsPositivityFloorViolation) {
    std::string text = kConstant;
    text.replace(text.find("w0 = \"1\""), 8, "w0 = \"sin(x)\"");
    EXPECT_FALSE(errors_of(text).empty());
}

TEST(Config, HashIgnoresFormatting) {
    const std::string a = with_checks(kConstant, "[weight]\nf = \"0.3*cos(x)\"\n");
    const std::string b = "# comment\n" +
                          with_checks(std::string(kConstant), "[weight]\n   f   =   \"0.3 * cos( x )\"   \n\n");
    EXPECT_EQ(scenario_hash(parse_config_text(a)), scenario_hash(parse_config_text(b)));
    const std::string c = with_checks(kConstant, "[weight]\nf = \"0.31*cos(x)\"\n");
    EXPECT_NE(scenario_hash(parse_config_text(a)), scenario_hash(parse_config_text(c)));
    EXPECT_EQ(scenario_hash(parse_config_text(a)).size(), 16u);
}

TEST(Config, EveryShippedScenarioValidates) {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(HARNACK_SCENARIO_DIR)) {
        if (entry.path().extension() != ".ini") continue;
        SCOPED_TRACE(entry.path().string());
        EXPECT_NO_THROW(parse_config(entry.path().string()));
        ++count;
    }
    EXPECT_GE(count, 5);
}

TEST(Harness, ConstantScenarioPassesEveryCheck) {
    const ReportBundle b = run_scenario(parse_config(std::string(HARNACK_SCENARIO_DIR) + "/constant.ini"));
    ASSERT_FALSE(b.abort.has_value());
    EXPECT_EQ(b.checks.size(), check_names().size());
    for (const CheckReport& r : b.checks) {
        SCOPED_TRACE(r.name);
        EXPECT_NE(r.verdict, Verdict::fail);
        EXPECT_EQ(r.lhs_sup, 0.0);
        EXPECT_EQ(r.min_margin, r.rhs_inf);
    }
    EXPECT_EQ(exit_code(b), 0);
}

TEST(Harness, PositivityLossBecomesAbort) {
    const std::string text = with_checks(kConstant, R"(
[nonlinearity]
case = custom_table
w = [0, 10]
g = [5, 5]
g_prime = [0, 0]

[checks.li_yau_global]
)");
    const ReportBundle b = run_scenario(parse_config_text(text));
    ASSERT_TRUE(b.abort.has_value());
    EXPECT_TRUE(b.checks.empty());
    EXPECT_NEAR(b.abort->time, 0.2, 0.05);
    EXPECT_EQ(exit_code(b), 2);
    EXPECT_NE(to_json(b).find("\"abort\""), std::string::npos);
}

TEST(Harness, EmptyCheckListGivesValidBundle) {
    const ReportBundle b = run_scenario(parse_config_text(kConstant));
    EXPECT_TRUE(b.checks.empty());
    const std::string json = to_json(b);
    EXPECT_NE(json.find("\"checks\": []"), std::string::npos);
    EXPECT_NE(json.find("\"schema_version\": 1"), std::string::npos);
    EXPECT_EQ(exit_code(b), 0);
}

TEST(Harness, CsvOneRowPerSnapshot) {
    std::string text = kConstant;
    text.replace(text.find("snapshot_count = 11"), 19, "snapshot_times = [0.25, 0.5]");
    text += "\n[checks.hamilton_bound]\nt_min = 0.1\n";
    const ReportBundle b = run_scenario(parse_config_text(text));
    ASSERT_EQ(b.checks.size(), 1u);
    const std::string csv = to_csv(b);
    std::istringstream in(csv);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) {
        if (!l.empty()) lines.push_back(l);
    }
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], "check,label,t,min_margin,lhs_sup,rhs_inf,tolerance,verdict");
}

TEST(Harness, JsonRoundTripIsBitExact) {
    const ReportBundle b = run_scenario(parse_config(std::string(HARNACK_SCENARIO_DIR) + "/fisher_kpp.ini"));
    const ReportBundle back = bundle_from_json(to_json(b));
    ASSERT_EQ(back.checks.size(), b.checks.size());
    for (std::size_t i = 0; i < b.checks.size(); ++i) {
        EXPECT_EQ(back.checks[i].min_margin, b.checks[i].min_margin);
        ASSERT_EQ(back.checks[i].series.size(), b.checks[i].series.size());
        for (std::size_t k = 0; k < b.checks[i].series.size(); ++k) {
            EXPECT_EQ(back.checks[i].series[k].min_margin, b.checks[i].series[k].min_margin);
        }
        EXPECT_EQ(back.checks[i].intermediates, b.checks[i].intermediates);
        EXPECT_EQ(back.checks[i].verdict, b.checks[i].verdict);
    }
    EXPECT_EQ(to_json(back, false), to_json(b, false));
}

TEST(Harness, RerunIsByteIdentical) {
    const Scenario s = parse_config(std::string(HARNACK_SCENARIO_DIR) + "/constant.ini");
    EXPECT_EQ(to_json(run_scenario(s), false), to_json(run_scenario(s), false));
}

TEST(Harness, PlotdataHasOneBlockPerCheck) {
    const ReportBundle b = run_scenario(parse_config(std::string(HARNACK_SCENARIO_DIR) + "/constant.ini"));
    const std::string pd = to_plotdata(b);
    std::size_t blocks = 0;
    for (std::size_t pos = 0; (pos = pd.find("\n\n\n", pos)) != std::string::npos; ++pos) ++blocks;
    EXPECT_EQ(blocks + 1, b.checks.size());
}

TEST(Harness, EmitWritesFiles) {
    const ReportBundle b = run_scenario(parse_config_text(kConstant));
    const auto dir = std::filesystem::temp_directory_path() / "harnack_emit_test";
    std::filesystem::create_directories(dir);
    for (const char* fmt : {"json", "csv", "plotdata"}) {
        const auto path = (dir / (std::string("out.") + fmt)).string();
        emit(b, fmt, path);
        EXPECT_TRUE(std::filesystem::exists(path));
    }
    EXPECT_THROW(emit(b, "json", "/nonexistent_dir/x/y.json"), std::exception);
    EXPECT_THROW(emit(b, "xml", (dir / "x.xml").string()), std::invalid_argument);
    std::filesystem::remove_all(dir);
}

TEST(Refinement, EmpiricalOrders) {
    const auto o = empirical_orders({1e-2, 2.5e-3, 1e-15});
    ASSERT_EQ(o.size(), 2u);
    EXPECT_NEAR(*o[0], 2.0, 1e-12);
    EXPECT_FALSE(o[1].has_value());
}

TEST(Refinement, LogisticTimeOrderIsFour) {
    const ReportBundle b = refinement_study(parse_config(std::string(HARNACK_SCENARIO_DIR) + "/logistic.ini"), 3);
    const ConvergenceTable& t = table(b, "sup_error_at_t_end");
    EXPECT_EQ(t.axis, "time");
    ASSERT_EQ(t.orders.size(), 2u);
    for (const auto& o : t.orders) {
        ASSERT_TRUE(o.has_value());
        EXPECT_GE(*o, 3.6);
        EXPECT_LE(*o, 4.4);
    }
}

TEST(Refinement, FourierGridOrderIsTwo) {
    const ReportBundle b = refinement_study(parse_config(std::string(HARNACK_SCENARIO_DIR) + "/fourier_decay.ini"), 3);
    const ConvergenceTable& t = table(b, "sup_error_at_t_end");
    EXPECT_EQ(t.axis, "grid");
    for (const auto& o : t.orders) {
        ASSERT_TRUE(o.has_value());
        EXPECT_GE(*o, 1.8);
        EXPECT_LE(*o, 2.2);
    }
}

TEST(Refinement, ConstantScenarioOrdersAreNotApplicable) {
    std::string s = kConstant;
    s.replace(s.find("snapshot_count = 11"), 19, "snapshot_count = 11\nreference = \"1\"");
    const ReportBundle b = refinement_study(parse_config_text(s), 3);
    const ConvergenceTable& t = table(b, "sup_error_at_t_end");
    for (double v : t.values) EXPECT_LT(v, 1e-13);
    for (const auto& o : t.orders) EXPECT_FALSE(o.has_value());
}

TEST(Refinement, RejectsBadLevelsAndBudget) {
    const Scenario s = parse_config_text(kConstant);
    EXPECT_THROW(refinement_study(s, 1), std::invalid_argument);
    EXPECT_THROW(refinement_study(s, 25), std::invalid_argument);
}
