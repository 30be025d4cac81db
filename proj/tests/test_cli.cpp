#include <doctest.h>

#include <fstream>

#include "firefit/app.hpp"
#include "firefit/concentric.hpp"
#include "firefit/constraint.hpp"
#include "firefit/field_io.hpp"
#include "firefit/io.hpp"
#include "firefit/optimizer.hpp"
#include "support.hpp"

using namespace firefit;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "firefit");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return app::run(static_cast<int>(argv.size()), argv.data());
}

std::size_t line_count(const fs::path& p) {
    std::ifstream is(p);
    std::size_t n = 0;
    for (std::string line; std::getline(is, line);) ++n;
    return n;
}

// A 41 x 41 concentric case, small enough for full fits in tests.
fs::path small_case(const std::string& name, bool detections = false) {
    const auto dir = test::temp_dir(name);
    std::vector<std::string> args{"gen-case", "--out", dir.string(), "--seed", "5",
                                  "--set", "grid.nx=41", "--set", "grid.ny=41",
                                  "--set", "case.center=[20,20]", "--set", "case.times=[6,15]",
                                  "--set", "case.points_per_circle=64"};
    if (detections) {
        for (std::string s : {"--set", "detections.count=300"}) args.push_back(s);
    }
    REQUIRE(run(args) == 0);
    return dir / "case.json";
}

}  // namespace

TEST_CASE("gen-case defaults reproduce the idealized experiment") {
    const auto dir = test::temp_dir("gen_default");
    REQUIRE(run({"gen-case", "--out", dir.string()}) == 0);
    for (const char* f : {"ros.asc", "exact.asc", "perimeters.csv", "case.json"}) CHECK(fs::exists(dir / f));
    const auto exact = load_field(dir / "exact.asc");
    const auto rates = load_field(dir / "ros.asc");
    CHECK(exact.grid() == make_grid(100, 100, 1, 1));
    const auto norm = upwind_gradient_norm(exact);
    for (std::size_t k = 0; k < exact.size(); ++k) {
        const double r = std::hypot(exact.grid().x(exact.grid().col(k)) - 50.0,
                                    exact.grid().y(exact.grid().row(k)) - 50.0);
        if (r > 2.0) CHECK(norm[k] * rates[k] == doctest::Approx(1.0).epsilon(1e-9));
    }
    const auto pers = read_perimeters_csv(dir / "perimeters.csv");
    REQUIRE(pers.size() == 3);
    CHECK(pers[0].points.size() == 1);
    CHECK(pers[1].points.size() == 128);
    CHECK(pers[2].points.size() == 128);
}

TEST_CASE("single unit sector gives a radius-16 circle at time 16") {
    ConcentricSpec spec;
    spec.sector_boundaries = {0.0};
    spec.sector_rates = {1.0};
    const auto cs = make_concentric_case(spec);
    REQUIRE(cs.spec.radii[0] == 16.0);
    for (const auto& p : cs.perimeters[1].points) {
        CHECK(std::hypot(p.x - 50.0, p.y - 50.0) == doctest::Approx(16.0));
        // first-order marching stays within 2h of the distance
        CHECK(std::abs(p.time - 16.0) <= 2.0);
    }
}

TEST_CASE("gen-case is reproducible for a seed") {
    const auto a = test::temp_dir("gen_a"), b = test::temp_dir("gen_b");
    for (const auto& d : {a, b}) {
        REQUIRE(run({"gen-case", "--out", d.string(), "--seed", "11", "--set", "detections.count=50"}) == 0);
    }
    for (const char* f : {"ros.asc", "exact.asc", "perimeters.csv", "case.json", "detections.csv"}) {
        CHECK(test::slurp(a / f) == test::slurp(b / f));
    }
    const auto c = test::temp_dir("gen_c");
    REQUIRE(run({"gen-case", "--out", c.string(), "--seed", "12", "--set", "detections.count=50"}) == 0);
    CHECK(test::slurp(a / "detections.csv") != test::slurp(c / "detections.csv"));
}

TEST_CASE("gen-case geometry errors are validation errors") {
    const auto dir = test::temp_dir("gen_bad");
    CHECK(run({"gen-case", "--out", dir.string(), "--set", "case.times=[40,16]"}) == 2);
    CHECK(run({"gen-case", "--out", dir.string(), "--set", "case.radii=[10,80]"}) == 2);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("init writes one grid per alpha with a shrinking funnel") {
    const auto cfg = small_case("init");
    const auto out = test::temp_dir("init_out");
    auto opts = app::load_options(cfg, {"smoother.alphas=[1.0, 1.4]"});
    opts.out_dir = out;
    const auto r = app::cmd_init(opts);
    REQUIRE(r.runs.size() == 2);
    CHECK(fs::exists(out / "init_alpha_1.00.asc"));
    CHECK(fs::exists(out / "init_alpha_1.40.asc"));
    CHECK(r.runs[1].funnel < r.runs[0].funnel);
    CHECK(line_count(out / "init_report.csv") == 3);
}

TEST_CASE("missing inputs and empty constraints fail validation without output") {
    const auto cfg = small_case("missing");
    const auto out = test::temp_dir("missing_out");
    CHECK(run({"init", "--config", cfg.string(), "--out", out.string(), "--set",
               "perimeters=[\"nowhere.csv\"]"}) == 2);
    try {
        auto opts = app::load_options(cfg, {"perimeters=[\"nowhere.csv\"]"});
        opts.out_dir = out;
        app::cmd_init(opts);
        FAIL("expected an error");
    } catch (const app::ValidationError& e) {
        CHECK(std::string(e.what()).find("nowhere.csv") != std::string::npos);
    }
    CHECK(run({"init", "--config", cfg.string(), "--out", out.string(), "--set", "perimeters=[]"}) == 2);
    CHECK(run({"fit", "--config", cfg.string(), "--out", out.string(), "--set", "schedule.cycles=-1"}) == 2);
    CHECK(run({"fit", "--config", cfg.string(), "--out", out.string(), "--set", "objective.f_variant=\"ratio\""}) == 2);
    CHECK(run({"init", "--config", (cfg.parent_path() / "nothing.json").string()}) == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("command-line usage errors") {
    CHECK(run({}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({"fit", "--seed", "abc"}) == 2);
    CHECK(run({"fit", "--set", "novalue"}) == 2);
    CHECK(run({"--help"}) == 0);
}

TEST_CASE("runtime failures exit with 1") {
    const auto cfg = small_case("runtime");
    const auto blocker = test::temp_dir("runtime_blocker");
    std::ofstream(blocker.string()) << "a file where a directory should go";
    CHECK(run({"init", "--config", cfg.string(), "--out", (blocker / "sub").string()}) == 1);
    fs::remove(blocker);
}

TEST_CASE("fit with no cycles returns the initializer") {
    const auto cfg = small_case("fit0");
    const auto out = test::temp_dir("fit0_out");
    REQUIRE(run({"fit", "--config", cfg.string(), "--out", out.string(), "--set", "schedule.cycles=0"}) == 0);
    CHECK(test::slurp(out / "fit.asc") == test::slurp(out / "initial.asc"));
    CHECK(line_count(out / "fit_report.csv") == 1);
}

TEST_CASE("fit report rows match the projected-direction count") {
    const auto cfg = small_case("fitcount");
    const auto out = test::temp_dir("fitcount_out");
    REQUIRE(run({"fit", "--config", cfg.string(), "--out", out.string(), "--set", "schedule.coarsest_step=8",
                 "--set", "schedule.sweeps=[1,2,1,1]", "--set", "schedule.cycles=2"}) == 0);

    const auto opts = app::load_options(cfg, {});
    const Grid g = make_grid(41, 41, 1, 1);
    std::vector<Perimeter> pers = read_perimeters_csv(cfg.parent_path() / "perimeters.csv");
    const auto c = build_constraints(g, pers);
    const std::size_t steps[] = {8, 4, 2, 1};
    const std::size_t sweeps[] = {1, 2, 1, 1};
    std::size_t expected = 0;
    for (int l = 0; l < 4; ++l) {
        std::size_t live = 0;
        for (std::size_t aj : coarse_lattice(g.ny, steps[l]))
            for (std::size_t ai : coarse_lattice(g.nx, steps[l]))
                live += project_direction(c, coarse_direction(g, steps[l], ai, aj)).max_abs() >= 1e-12;
        expected += 2 * sweeps[l] * live;
    }
    CHECK(line_count(out / "fit_report.csv") == expected + 1);
    CHECK(opts.config.at("exact").get<std::string>() == "exact.asc");
}

TEST_CASE("fit improves on the initializer against the exact field") {
    const auto cfg = small_case("fitgood");
    auto opts = app::load_options(cfg, {"schedule.coarsest_step=8", "schedule.sweeps=[1,2,3,4]",
                                        "schedule.cycles=2"});
    opts.out_dir = test::temp_dir("fitgood_out");
    const auto r = app::cmd_fit(opts);
    REQUIRE(r.final_error.has_value());
    CHECK(*r.final_error < *r.initial_error);
    CHECK(r.fit.report.max_violation <= 1e-10);
    CHECK(fs::exists(opts.out_dir / "fit_summary.json"));
}

TEST_CASE("ignition command") {
    const auto cfg = small_case("ign", true);
    SUBCASE("truth ranks first on the generated detections") {
        auto opts = app::load_options(cfg, {"ignition.x_range=[10,30]", "ignition.y_range=[10,30]"});
        opts.out_dir = test::temp_dir("ign_out");
        const auto r = app::cmd_ignition(opts);
        REQUIRE(r.ranked.size() == 25);
        CHECK(r.ranked[0].candidate.x == 20.0);
        CHECK(r.ranked[0].candidate.y == 20.0);
        CHECK(line_count(r.file) == 26);
    }
    SUBCASE("no detections scores every candidate zero in index order") {
        auto opts = app::load_options(cfg, {"detection.path=null"});
        opts.config["detection"].erase("path");
        opts.out_dir = test::temp_dir("ign_empty");
        const auto r = app::cmd_ignition(opts);
        for (std::size_t k = 0; k < r.ranked.size(); ++k) {
            CHECK(r.ranked[k].index == k);
            CHECK(r.ranked[k].log_likelihood == 0.0);
        }
    }
    SUBCASE("a 1 x 1 lattice writes one row") {
        const auto out = test::temp_dir("ign_one");
        REQUIRE(run({"ignition", "--config", cfg.string(), "--out", out.string(), "--set", "ignition.nx=1",
                     "--set", "ignition.ny=1"}) == 0);
        CHECK(line_count(out / "ignition.csv") == 2);
    }
    SUBCASE("a lattice leaving the grid is a validation error") {
        const auto out = test::temp_dir("ign_bad");
        CHECK(run({"ignition", "--config", cfg.string(), "--out", out.string(), "--set",
                   "ignition.x_range=[-5,30]"}) == 2);
        CHECK_FALSE(fs::exists(out));
    }
}

TEST_CASE("option overrides") {
    const auto opts = app::load_options(std::nullopt, {"a.b=3", "a.c=[1,2]", "name=plain text"});
    CHECK(opts.config["a"]["b"] == 3);
    CHECK(opts.config["a"]["c"].size() == 2);
    CHECK(opts.config["name"] == "plain text");
    CHECK_THROWS_AS(app::load_options(std::nullopt, {"=1"}), app::ValidationError);
}
