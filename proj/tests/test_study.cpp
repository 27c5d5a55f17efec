#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "smoothcolloc/study.hpp"

using namespace sc;

TEST_SUITE_BEGIN("study");

TEST_CASE("single level on the one-patch domain") {
    auto dom = resolve_domain("one-patch");
    auto lr = run_level(dom, 4, 9, 4, 3, PointFamily::greville, "builtin:trig");
    CHECK(lr.rows == 625);
    CHECK(lr.cols == 625);
    CHECK(lr.solve.residual <= 1e-9 * 1.0);
    CHECK(lr.errors.e[0] < 1e-2);
    CHECK(lr.errors.e[4] < 1.0);

    auto fine = run_level(dom, 4, 9, 4, 7, PointFamily::greville, "builtin:trig");
    CHECK(fine.rows == 2025);
    for (int m = 0; m < 5; ++m) CHECK(fine.errors.e[m] < lr.errors.e[m]);
    auto orders = convergence_orders(lr.errors, fine.errors);
    for (int m = 0; m < 5; ++m) {
        CHECK(orders[m] > 4.0);
        CHECK(orders[m] < 8.5);
    }
}

TEST_CASE("study writes stable CSVs and plot data") {
    StudyConfig cfg;
    cfg.domain = "one-patch";
    cfg.densities = {4, 8};
    cfg.families = {PointFamily::greville};
    cfg.outdir = "study_tmp_a";
    std::ostringstream log;
    auto res = run_study(cfg, log);
    REQUIRE(res.families.size() == 1);
    REQUIRE(res.families[0].levels.size() == 2);
    CHECK(res.families[0].failures.empty());
    REQUIRE(res.csv_paths.size() == 1);

    std::ifstream csv(res.csv_paths[0]);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "h,eL2,eH1,eH2,eH3,eH4,oL2,oH1,oH2,oH3,oH4");
    std::string row1, row2, extra;
    REQUIRE(std::getline(csv, row1));
    REQUIRE(std::getline(csv, row2));
    CHECK(!std::getline(csv, extra));
    CHECK(row1.substr(0, row1.find(',')) == "0.25");
    // second level carries order entries
    CHECK(row2.find(",,,,,") == std::string::npos);

    cfg.outdir = "study_tmp_b";
    auto res2 = run_study(cfg, log);
    std::ifstream f1(res.csv_paths[0]), f2(res2.csv_paths[0]);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());

    std::ifstream plot(res.plot_path);
    std::string pline;
    std::getline(plot, pline);
    CHECK(pline.find("log2h") != std::string::npos);

    for (const char* d : {"study_tmp_a", "study_tmp_b"}) {
        std::remove((std::string(d) + "/study_greville.csv").c_str());
        std::remove((std::string(d) + "/study_plot.dat").c_str());
        std::remove(d);
    }
}

TEST_CASE("failures are recorded and the study continues") {
    StudyConfig cfg;
    cfg.domain = "one-patch";
    cfg.densities = {0, 4};  // first level invalid
    cfg.families = {PointFamily::greville};
    cfg.outdir = "study_tmp_c";
    std::ostringstream log;
    auto res = run_study(cfg, log);
    CHECK(res.families[0].failures.size() == 1);
    CHECK(res.families[0].levels.size() == 1);
    std::remove("study_tmp_c/study_greville.csv");
    std::remove("study_tmp_c/study_plot.dat");
    std::remove("study_tmp_c");
}

TEST_CASE("domain and solution resolution") {
    CHECK_THROWS(resolve_domain("missing-file.domain"));
    auto dom = resolve_domain("two-patch-L");
    CHECK(dom.patch_count() == 2);
    auto space = assemble_space(dom, 3, 7, 3, 1);
    CHECK_THROWS(resolve_solution("not-a-file.coef", space));
    auto ms = resolve_solution("builtin:trig", space);
    CHECK(ms.closed_form);
}

TEST_SUITE_END();
