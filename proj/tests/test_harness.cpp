#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvclt/errors.hpp"
#include "tvclt/harness.hpp"

using namespace tvclt;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const auto p = fs::temp_directory_path() / "tvclt_harness_tests";
    fs::create_directories(p);
    return p;
}

fs::path write_json(const std::string& name, const std::string& text) {
    const auto p = scratch_dir() / name;
    std::ofstream out(p);
    out << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kMinimal = R"({
  "sequences": [{"name": "lap", "base": {"family": "laplace"}}],
  "n_values": [2]
})";

}  // namespace

TEST_CASE("minimal config picks up documented defaults") {
    const auto cfg = load_config(write_json("minimal.json", kMinimal).string());
    REQUIRE(cfg.sequences.size() == 1);
    CHECK(cfg.sequences[0].name == "lap");
    CHECK(cfg.sequences[0].base.scale == 1.0);
    CHECK(cfg.sequences[0].profile.kind == "iid");
    CHECK(cfg.n_values == std::vector<std::size_t>{2});
    CHECK(cfg.grid.m == std::size_t{1} << 14);
    CHECK(cfg.grid.extent_sigmas == 12.0);
    CHECK(cfg.epsilon_grid.count == 50);
    CHECK(cfg.epsilon_grid.lo == 1e-3);
    CHECK(cfg.epsilon_grid.hi == 1.0);
    CHECK(cfg.delta_grid.empty());
    CHECK(cfg.c_constant == 1.0);
    CHECK(cfg.checks.identities);
    CHECK(cfg.checks.atom_smoothing);
    CHECK(cfg.output.dir == "out");
    CHECK(cfg.output.formats == std::vector<std::string>{"csv", "json"});
    CHECK(cfg.seed == 1);
    CHECK(cfg.threads == 0);
}

TEST_CASE("config validation names the offending field") {
    const auto try_load = [](const std::string& body) {
        return load_config(write_json("bad.json", body).string());
    };
    // grid size must be a power of two
    CHECK_THROWS_WITH_AS(
        try_load(R"({"sequences":[{"name":"a","base":{"family":"laplace"}}],
                     "n_values":[2],"grid":{"m":1000}})"),
        doctest::Contains("m"), ValidationError);
    // unknown keys are rejected by name
    CHECK_THROWS_WITH_AS(
        try_load(R"({"sequences":[{"name":"a","base":{"family":"laplace"}}],
                     "n_values":[2],"bogus_knob":1})"),
        doctest::Contains("bogus_knob"), ValidationError);
    CHECK_THROWS_WITH_AS(
        try_load(R"({"sequences":[{"name":"a","base":{"family":"laplace",
                     "half_width":2}}],"n_values":[2]})"),
        doctest::Contains("half_width"), ValidationError);
    // malformed names, duplicate names, bad n ordering
    CHECK_THROWS_AS(
        try_load(R"({"sequences":[{"name":"a b","base":{"family":"laplace"}}],
                     "n_values":[2]})"),
        ValidationError);
    CHECK_THROWS_AS(
        try_load(R"({"sequences":[{"name":"a","base":{"family":"laplace"}},
                                  {"name":"a","base":{"family":"normal"}}],
                     "n_values":[2]})"),
        ValidationError);
    CHECK_THROWS_AS(
        try_load(R"({"sequences":[{"name":"a","base":{"family":"laplace"}}],
                     "n_values":[4,2]})"),
        ValidationError);
    CHECK_THROWS_AS(
        try_load(R"({"sequences":[{"name":"a","base":{"family":"laplace"}}],
                     "n_values":[2],"output":{"formats":["csv","pdf"]}})"),
        ValidationError);
    CHECK_THROWS_AS(
        try_load(R"({"sequences":[{"name":"a","base":{"family":"weird"}}],
                     "n_values":[2]})"),
        ValidationError);
    CHECK_THROWS_AS(try_load("{not json"), ParseError);
    CHECK_THROWS_AS(load_config((scratch_dir() / "missing.json").string()),
                    IoError);
}

TEST_CASE("configs round-trip byte for byte") {
    const auto p1 = write_json("roundtrip.json", kMinimal);
    const auto cfg = load_config(p1.string());
    const auto p2 = scratch_dir() / "canonical.json";
    save_config(cfg, p2.string());
    const auto cfg2 = load_config(p2.string());
    const auto p3 = scratch_dir() / "canonical2.json";
    save_config(cfg2, p3.string());
    const auto a = slurp(p2), b = slurp(p3);
    REQUIRE_FALSE(a.empty());
    CHECK(a == b);
    CHECK(a == config_to_text(cfg));
    CHECK(a.back() == '\n');
}

TEST_CASE("cyclic scale profiles repeat over the summands") {
    SequenceSpec s;
    s.name = "cyc";
    s.base.family = "laplace";
    s.profile.kind = "cycle";
    s.profile.scales = {2.0, 3.0, 1.0};
    const auto seq = build_sequence(s, 5);
    REQUIRE(seq.size() == 5);
    // laplace(scale s) has variance 2 s^2; pattern 2,3,1,2,3
    CHECK(seq.sigma2(1) == doctest::Approx(8.0));
    CHECK(seq.sigma2(2) == doctest::Approx(18.0));
    CHECK(seq.sigma2(3) == doctest::Approx(2.0));
    CHECK(seq.sigma2(4) == doctest::Approx(8.0));
    CHECK(seq.sigma2(5) == doctest::Approx(18.0));
    // iid sequences share one spec object
    SequenceSpec i;
    i.name = "iid";
    i.base.family = "normal";
    const auto ii = build_sequence(i, 4);
    CHECK(ii.spec(1).get() == ii.spec(4).get());
}

TEST_CASE("base spec families materialize correctly") {
    BaseSpec b;
    b.family = "smoothed_uniform";
    b.half_width = 2.0;
    b.delta = 0.5;
    const auto d = build_base(b);
    CHECK(d->variance() == doctest::Approx(4.0 / 3.0 + 0.25).epsilon(1e-12));
    BaseSpec m;
    m.family = "gaussian_mixture";
    m.weights = {0.5, 0.5};
    m.means = {-1.0, 1.0};
    m.sigmas = {0.5, 0.5};
    CHECK(build_base(m)->variance() == doctest::Approx(1.25).epsilon(1e-12));
    BaseSpec bad;
    bad.family = "gaussian_mixture";
    bad.weights = {1.0};
    bad.means = {0.0, 1.0};
    bad.sigmas = {1.0, 1.0};
    CHECK_THROWS_AS(build_base(bad), ValidationError);
}

namespace {

ExperimentConfig small_config(const std::string& out_dir) {
    ExperimentConfig cfg;
    SequenceSpec a;
    a.name = "lap";
    a.base.family = "laplace";
    SequenceSpec b;
    b.name = "cyc";
    b.base.family = "logistic";
    b.profile.kind = "cycle";
    b.profile.scales = {1.0, 2.0};
    cfg.sequences = {a, b};
    cfg.n_values = {2, 4};
    cfg.epsilon_grid.count = 3;
    cfg.grid = GridConfig{1 << 10, 14.0};
    cfg.checks.identities = false;
    cfg.checks.atom_smoothing = false;
    cfg.output.dir = out_dir;
    cfg.output.formats = {"csv", "json", "svg"};
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST_CASE("small end-to-end run emits stable reports") {
    const auto dir = (scratch_dir() / "run_a").string();
    auto cfg = small_config(dir);
    const auto rep = run(cfg);
    CHECK(rep.ok);
    REQUIRE(rep.rows.size() == 4);
    // sorted by (sequence, n); "cyc" < "lap"
    CHECK(rep.rows[0].sequence == "cyc");
    CHECK(rep.rows[0].report.n == 2);
    CHECK(rep.rows[1].report.n == 4);
    CHECK(rep.rows[2].sequence == "lap");
    for (const auto& r : rep.rows) {
        CAPTURE(r.sequence);
        CHECK(r.error.empty());
        CHECK(r.report.bound_finite);
        CHECK(r.report.bound_holds);
    }
    REQUIRE(rep.lindeberg.size() == 4);
    for (const auto& t : rep.lindeberg) {
        REQUIRE(t.points.size() == 3);
        CHECK(t.points.front().eps == 1e-3);
        CHECK(t.points.back().eps == 1.0);
        // the lindeberg functional shrinks as eps grows
        CHECK(t.points.front().l_n >= t.points.back().l_n);
    }
    CHECK(rep.identities.empty());
    CHECK(rep.smoothed_atoms.empty());

    emit(rep, cfg);
    const auto csv = slurp(fs::path(dir) / "report.csv");
    REQUIRE_FALSE(csv.empty());
    CHECK(csv.rfind("sequence,n,j_max,feller,m_n,tv_bound,tv_actual,k_actual,"
                    "slack_ratio\n",
                    0) == 0);
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 5);

    const auto json_text = slurp(fs::path(dir) / "report.json");
    const auto j = nlohmann::ordered_json::parse(json_text);
    CHECK(j["version"].get<std::string>() == version_string());
    CHECK(j["ok"].get<bool>());
    REQUIRE(j["cases"].size() == 4);
    CHECK(j["cases"][0]["sequence"] == "cyc");
    CHECK(j["cases"][0]["n"] == 2);
    CHECK(j["config"]["grid"]["m"] == 1024);
    // serialized form is the canonical dump
    CHECK(json_text == j.dump(2) + "\n");

    for (const char* name :
         {"cyc_tv_decay.svg", "lap_tv_decay.svg", "cyc_lindeberg.svg",
          "lap_lindeberg.svg"}) {
        CAPTURE(name);
        const auto svg = slurp(fs::path(dir) / name);
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.find("</svg>") != std::string::npos);
    }
}

TEST_CASE("runs are deterministic across thread counts") {
    // same config, same output dir: only the runtime thread knob changes,
    // and that knob is never serialized
    const auto dir = (scratch_dir() / "run_threads").string();
    auto cfg = small_config(dir);
    cfg.threads = 1;
    emit(run(cfg), cfg);
    const auto csv1 = slurp(fs::path(dir) / "report.csv");
    const auto json1 = slurp(fs::path(dir) / "report.json");
    cfg.threads = 4;
    emit(run(cfg), cfg);
    CHECK(csv1 == slurp(fs::path(dir) / "report.csv"));
    CHECK(json1 == slurp(fs::path(dir) / "report.json"));
}

TEST_CASE("case failures are isolated and flip the exit contract") {
    auto cfg = small_config((scratch_dir() / "run_bad").string());
    cfg.grid.extent_sigmas = 3.0;  // clips far more than the allowed 1e-9
    const auto rep = run(cfg);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.rows.size() == 4);
    for (const auto& r : rep.rows) {
        CHECK_FALSE(r.error.empty());
        CHECK(r.report.n != 0);  // n is preserved on failed cases
    }
    // emission still works; failed rows carry nan placeholders
    emit(rep, cfg);
    const auto csv = slurp(scratch_dir() / "run_bad" / "report.csv");
    CHECK(csv.find("nan") != std::string::npos);
    const auto j = nlohmann::ordered_json::parse(
        slurp(scratch_dir() / "run_bad" / "report.json"));
    CHECK_FALSE(j["ok"].get<bool>());
    CHECK_FALSE(j["cases"][0]["error"].get<std::string>().empty());
}

TEST_CASE("identity and stein suites are summarized when enabled") {
    const auto cells = identity_suite();
    REQUIRE(cells.size() == 16);
    for (const auto& c : cells) {
        CAPTURE(c.family);
        CAPTURE(c.test_fn);
        CHECK(c.ibp_gap < kIdentityTol);
        CHECK(c.kernel_gap < kIdentityTol);
    }
    const auto stein = stein_equation_suite(1, 4);
    CHECK(stein.count == 4);
    CHECK(stein.max_residual < kResidualTol);
    CHECK(stein.max_sup_f <= 2.5066282746310005 + 1e-6);
    CHECK(stein.max_sup_fprime <= 4.0 + 1e-6);
}

TEST_CASE("atom smoothing demo rows certify the smoothed-atom route") {
    ExperimentConfig cfg;
    SequenceSpec a;
    a.name = "lap";
    a.base.family = "laplace";
    cfg.sequences = {a};
    cfg.n_values = {2, 4};
    cfg.epsilon_grid.count = 2;
    cfg.grid = GridConfig{1 << 10, 14.0};
    cfg.checks.identities = false;
    cfg.checks.atom_smoothing = true;
    cfg.threads = 1;
    const auto rep = run(cfg);
    CHECK(rep.atoms_error.empty());
    REQUIRE(rep.smoothed_atoms.size() == 2);
    for (const auto& r : rep.smoothed_atoms) {
        CAPTURE(r.n);
        CHECK(r.bound_finite);
        CHECK(r.j == doctest::Approx(1.1008009815866543).epsilon(1e-9));
        CHECK(r.tv_actual <= r.tv_bound + 1e-6);
    }
}
