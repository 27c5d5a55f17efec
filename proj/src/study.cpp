#include "smoothcolloc/study.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <sys/stat.h>

namespace sc {

MultiPatchDomain resolve_domain(const std::string& spec) {
    for (const auto& name : MultiPatchDomain::builtin_names())
        if (name == spec) return MultiPatchDomain::builtin(spec);
    return MultiPatchDomain::load_file(spec);
}

ManufacturedSolution resolve_solution(const std::string& spec, const SmoothSpace& space) {
    if (spec == "builtin:trig" || spec == "trig") return ManufacturedSolution::trig();
    std::ifstream in(spec);
    if (!in) throw std::runtime_error("cannot open solution coefficient file: " + spec);
    std::vector<double> vals;
    double v;
    while (in >> v) vals.push_back(v);
    if (static_cast<int>(vals.size()) != space.dim())
        throw std::runtime_error("solution file carries " + std::to_string(vals.size()) +
                                 " coefficients, expected " + std::to_string(space.dim()));
    Eigen::VectorXd c = Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
    return ManufacturedSolution::from_coefficients(space, c);
}

LevelResult run_level(const MultiPatchDomain& dom, int smoothness, int p, int r, int k,
                      PointFamily family, const std::string& solution) {
    SmoothSpace space = assemble_space(dom, smoothness, p, r, k);
    ManufacturedSolution ms = resolve_solution(solution, space);
    UnivariatePoints uni = make_univariate(family, p, r, k);
    GlobalPointSet pts = tensor_and_globalize(dom, uni);
    assign_roles(dom, pts);
    avoid_nonsmooth_loci(dom, pts, smoothness);
    CollocationSystem sys = assemble(space, pts, ms);
    LevelResult lr;
    lr.k = k;
    lr.h = 1.0 / (k + 1);
    lr.rows = sys.A.rows();
    lr.cols = sys.A.cols();
    lr.solve = solve_qr(sys);
    lr.errors = relative_errors(space, lr.solve.c, ms);
    return lr;
}

namespace {

std::string format_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

}  // namespace

void write_family_csv(std::ostream& os, const FamilyStudy& fs) {
    os << "h,eL2,eH1,eH2,eH3,eH4,oL2,oH1,oH2,oH3,oH4\n";
    for (size_t i = 0; i < fs.levels.size(); ++i) {
        const LevelResult& lr = fs.levels[i];
        os << format_sig(lr.h, 10);
        for (double e : lr.errors.e) os << "," << format_sig(e, 10);
        if (i == 0 || std::abs(fs.levels[i - 1].h / lr.h - 2.0) > 1e-9) {
            os << ",,,,,";
        } else {
            auto orders = convergence_orders(fs.levels[i - 1].errors, lr.errors);
            for (double o : orders) {
                os << ",";
                if (std::isfinite(o)) os << format_sig(o, 10);
            }
        }
        os << "\n";
    }
}

void write_plot_data(std::ostream& os, const StudyResult& sr) {
    os << "# family log2h log10eL2 log10eH1 log10eH2 log10eH3 log10eH4\n";
    for (const auto& fs : sr.families)
        for (const auto& lr : fs.levels) {
            os << to_string(fs.family) << " " << format_sig(std::log2(lr.h), 10);
            for (double e : lr.errors.e)
                os << " " << format_sig(e > 0 ? std::log10(e) : -std::numeric_limits<double>::infinity(), 10);
            os << "\n";
        }
}

StudyResult run_study(const StudyConfig& cfg, std::ostream& log) {
    MultiPatchDomain dom = resolve_domain(cfg.domain);
    StudyResult sr;
    ::mkdir(cfg.outdir.c_str(), 0755);
    for (PointFamily fam : cfg.families) {
        FamilyStudy fs;
        fs.family = fam;
        for (int dens : cfg.densities) {
            if (dens < 1) {
                fs.failures.push_back("invalid mesh density " + std::to_string(dens));
                continue;
            }
            int k = dens - 1;
            try {
                LevelResult lr =
                    run_level(dom, cfg.smoothness, cfg.p, cfg.r, k, fam, cfg.solution);
                log << to_string(fam) << " h=1/" << dens << ": system " << lr.rows << "x"
                    << lr.cols << ", cond~" << format_sig(lr.solve.condition, 3) << " ("
                    << lr.solve.method << "), eL2=" << format_sig(lr.errors.e[0], 3) << "\n";
                fs.levels.push_back(std::move(lr));
            } catch (const std::exception& ex) {
                fs.failures.push_back("h=1/" + std::to_string(dens) + ": " + ex.what());
                log << to_string(fam) << " h=1/" << dens << " failed: " << ex.what() << "\n";
            }
        }
        sr.families.push_back(std::move(fs));
    }
    for (const auto& fs : sr.families) {
        std::string path = cfg.outdir + "/study_" + to_string(fs.family) + ".csv";
        std::ofstream os(path);
        write_family_csv(os, fs);
        sr.csv_paths.push_back(path);
    }
    sr.plot_path = cfg.outdir + "/study_plot.dat";
    std::ofstream pos(sr.plot_path);
    write_plot_data(pos, sr);
    return sr;
}

}  // namespace sc
