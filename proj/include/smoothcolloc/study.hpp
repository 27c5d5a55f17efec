/** @file study.hpp

    @brief End-to-end runs: single solves and multi-level convergence studies
    with CSV / plot-data output.
*/

#pragma once

#include <iosfwd>
#include <optional>

#include "smoothcolloc/errors.hpp"
#include "smoothcolloc/lsq.hpp"

namespace sc {

struct StudyConfig {
    std::string domain = "one-patch";  // builtin name or path to a domain file
    int smoothness = 4;
    int p = 9;
    int r = 4;
    std::vector<int> densities = {4, 8, 16};  // k + 1 per level
    std::vector<PointFamily> families = {PointFamily::greville, PointFamily::superconvergent};
    std::string solution = "builtin:trig";    // or a coefficient file for the space
    std::string outdir = ".";
};

struct LevelResult {
    int k = 0;
    double h = 1.0;
    Eigen::Index rows = 0, cols = 0;
    SolveReport solve;
    ErrorReport errors;
};

/// builtin name, or a readable file path
MultiPatchDomain resolve_domain(const std::string& spec);

/// "builtin:trig" or a whitespace-separated coefficient file for `space`
ManufacturedSolution resolve_solution(const std::string& spec, const SmoothSpace& space);

LevelResult run_level(const MultiPatchDomain& dom, int smoothness, int p, int r, int k,
                      PointFamily family, const std::string& solution);

struct FamilyStudy {
    PointFamily family;
    std::vector<LevelResult> levels;              // successful levels, coarse to fine
    std::vector<std::string> failures;            // messages of failed levels
};

struct StudyResult {
    std::vector<FamilyStudy> families;
    std::vector<std::string> csv_paths;
    std::string plot_path;
};

/// Runs all levels for all families, writes one CSV per family plus one
/// combined plot-data file. Per-level failures are recorded and the study
/// continues; the exit code is 1 when any level failed, otherwise 0.
StudyResult run_study(const StudyConfig& cfg, std::ostream& log);

void write_family_csv(std::ostream& os, const FamilyStudy& fs);
void write_plot_data(std::ostream& os, const StudyResult& sr);

}  // namespace sc
