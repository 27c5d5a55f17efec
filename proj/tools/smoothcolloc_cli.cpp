/** @file smoothcolloc_cli.cpp

    @brief Command-line front end: collocation point inspection, smooth-space
    construction reports, single solves and multi-level convergence studies.
*/

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "smoothcolloc/study.hpp"

using namespace sc;

namespace {

void apply_thread_cap() {
    if (const char* env = std::getenv("SMOOTHCOLLOC_THREADS")) {
        int t = std::atoi(env);
        if (t > 0) Eigen::setNbThreads(t);
    }
}

int cmd_points(int p, int r, int k, const std::string& family) {
    auto uni = make_univariate(family_from_string(family), p, r, k);
    std::printf("# family %s p %d r %d k %d count %zu\n", to_string(uni.family).c_str(), p, r, k,
                uni.points.size());
    for (size_t i = 0; i < uni.points.size(); ++i)
        std::printf("%.17g %s\n", uni.points[i], to_string(uni.provenance[i]).c_str());
    for (double x : uni.removed) std::printf("# %.17g removed-adjacent\n", x);
    return 0;
}

int cmd_space(const std::string& domain, int s, int p, int r, int k, const std::string& dump) {
    MultiPatchDomain dom = resolve_domain(domain);
    SmoothSpace space = assemble_space(dom, s, p, r, k);
    std::map<std::string, int> patch_counts, edge_counts, vertex_counts;
    for (const auto& fn : space.functions) {
        std::string key = std::to_string(fn.origin_index);
        if (fn.origin == FnOrigin::patch) ++patch_counts[key];
        if (fn.origin == FnOrigin::edge) ++edge_counts[key];
        if (fn.origin == FnOrigin::vertex) ++vertex_counts[key];
    }
    std::printf("domain %s: %d patches, %zu inner edges, %zu vertices\n", domain.c_str(),
                dom.patch_count(), dom.inner_edges().size(), dom.vertices().size());
    for (auto& [key, cnt] : patch_counts) std::printf("patch %s: %d functions\n", key.c_str(), cnt);
    for (auto& [key, cnt] : edge_counts)
        std::printf("interface %s: %d functions\n", key.c_str(), cnt);
    for (auto& [key, cnt] : vertex_counts)
        std::printf("vertex %s: %d functions (kernel)\n", key.c_str(), cnt);
    std::printf("dimension %d\n", space.dim());
    if (!dump.empty()) {
        std::ofstream os(dump);
        space.export_text(os);
        std::printf("coefficients written to %s\n", dump.c_str());
    }
    double jump = space.max_interface_jump();
    std::printf("max interface jump (orders 0..%d, relative): %.3e\n", s, jump);
    return jump <= 1e-8 ? 0 : 1;
}

int cmd_solve(const std::string& domain, int s, int p, int r, int k, const std::string& family,
              const std::string& solution, const std::string& out) {
    MultiPatchDomain dom = resolve_domain(domain);
    std::vector<std::string> written;
    try {
        LevelResult lr = run_level(dom, s, p, r, k, family_from_string(family), solution);
        std::printf("system %ld x %ld, condition ~ %.3e (%s), residual %.3e\n",
                    static_cast<long>(lr.rows), static_cast<long>(lr.cols), lr.solve.condition,
                    lr.solve.method.c_str(), lr.solve.residual);
        FamilyStudy fs;
        fs.family = family_from_string(family);
        fs.levels.push_back(lr);
        if (!out.empty()) {
            std::string path = out + "/solve_" + to_string(fs.family) + ".csv";
            std::ofstream os(path);
            if (!os) throw std::runtime_error("cannot write " + path);
            written.push_back(path);
            write_family_csv(os, fs);
            std::printf("errors written to %s\n", path.c_str());
        }
        std::printf("h %.10g errors", lr.errors.h);
        for (double e : lr.errors.e) std::printf(" %.10g", e);
        std::printf("\n");
        return 0;
    } catch (...) {
        for (const auto& path : written) std::remove(path.c_str());
        throw;
    }
}

int cmd_study(const std::string& domain, int s, int p, int r, const std::string& levels,
              const std::string& family, const std::string& solution, const std::string& out) {
    StudyConfig cfg;
    cfg.domain = domain;
    cfg.smoothness = s;
    cfg.p = p;
    cfg.r = r;
    cfg.solution = solution;
    cfg.outdir = out.empty() ? "." : out;
    cfg.densities.clear();
    std::stringstream ls(levels);
    std::string tok;
    while (std::getline(ls, tok, ','))
        if (!tok.empty()) cfg.densities.push_back(std::stoi(tok));
    if (cfg.densities.empty()) throw CLI::ValidationError("--levels", "no mesh densities given");
    if (family == "both")
        cfg.families = {PointFamily::greville, PointFamily::superconvergent};
    else
        cfg.families = {family_from_string(family)};
    auto res = run_study(cfg, std::cout);
    for (const auto& path : res.csv_paths) std::printf("wrote %s\n", path.c_str());
    std::printf("wrote %s\n", res.plot_path.c_str());
    for (const auto& fs : res.families)
        if (!fs.failures.empty()) return 1;
    return 0;
}

int cmd_domains(const std::string& name) {
    if (name.empty()) {
        for (const auto& n : MultiPatchDomain::builtin_names()) std::printf("%s\n", n.c_str());
        return 0;
    }
    std::fputs(MultiPatchDomain::builtin_text(name).c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_cap();
    CLI::App app{"isogeometric collocation for the biharmonic equation on multi-patch domains"};
    app.require_subcommand(1);

    int p = 9, r = 4, k = 3, s = 4;
    std::string family = "greville", domain = "one-patch", solution = "builtin:trig";
    std::string out, levels = "4,8,16", dump, name;

    auto* cp = app.add_subcommand("points", "univariate collocation points with provenance");
    cp->add_option("--p", p, "spline degree");
    cp->add_option("--r", r, "inner regularity");
    cp->add_option("--k", k, "inner knot count");
    cp->add_option("--family", family, "greville | superconvergent");

    auto* cs = app.add_subcommand("space", "smooth space construction report");
    cs->add_option("--domain", domain, "builtin name or domain file");
    cs->add_option("--smoothness", s, "3 | 4");
    cs->add_option("--p", p, "spline degree");
    cs->add_option("--r", r, "inner regularity");
    cs->add_option("--k", k, "inner knot count");
    cs->add_option("--dump", dump, "write basis coefficients to this file");

    auto* cv = app.add_subcommand("solve", "assemble and solve one level");
    cv->add_option("--domain", domain, "builtin name or domain file");
    cv->add_option("--smoothness", s, "3 | 4");
    cv->add_option("--p", p, "spline degree");
    cv->add_option("--r", r, "inner regularity");
    cv->add_option("--k", k, "inner knot count");
    cv->add_option("--family", family, "greville | superconvergent");
    cv->add_option("--solution", solution, "builtin:trig or coefficient file");
    cv->add_option("--out", out, "output directory for the CSV row");

    auto* cst = app.add_subcommand("study", "multi-level convergence study");
    cst->add_option("--domain", domain, "builtin name or domain file");
    cst->add_option("--smoothness", s, "3 | 4");
    cst->add_option("--p", p, "spline degree");
    cst->add_option("--r", r, "inner regularity");
    cst->add_option("--levels", levels, "comma-separated mesh densities k+1, e.g. 4,8,16");
    cst->add_option("--family", family, "greville | superconvergent | both");
    cst->add_option("--solution", solution, "builtin:trig or coefficient file");
    cst->add_option("--out", out, "output directory");

    auto* cd = app.add_subcommand("domains", "list builtin domains or print one as a file");
    cd->add_option("name", name, "builtin domain name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cp->parsed()) return cmd_points(p, r, k, family);
        if (cs->parsed()) return cmd_space(domain, s, p, r, k, dump);
        if (cv->parsed()) return cmd_solve(domain, s, p, r, k, family, solution, out);
        if (cst->parsed()) return cmd_study(domain, s, p, r, levels, family, solution, out);
        if (cd->parsed()) return cmd_domains(name);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
