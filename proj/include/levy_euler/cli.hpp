#pragma once

#include <filesystem>
#include <string>

#include "levy_euler/config.hpp"

namespace levy_euler {

enum class Subcommand
{
    rate,
    one_step,
    check_generator,
    sample_stable
};

Subcommand parse_subcommand(std::string const& s);
std::string to_string(Subcommand s);

//! Shortest form with 17 significant digits, '.' separator, locale-free.
std::string format_double(double v);

/*!
 * Runs one pipeline and writes its files into out_dir (created if needed):
 *
 *   rate             points.csv, report.csv, meta.json
 *   one-step         points.csv, report.csv, meta.json
 *   check-generator  points.csv, report.csv, generator.json, meta.json
 *   sample-stable    samples.csv, moments.json, meta.json
 *
 * Returns 0 iff every pass flag is true, 1 otherwise.  Errors propagate.
 */
int run(Subcommand sub, ExperimentConfig const& config,
        std::filesystem::path const& out_dir);

/*!
 * Entry point of the levy-euler executable.
 *
 * levy-euler <subcommand> --config <path> --out <dir> [--seed N] [--workers K]
 *
 * Seed and worker count resolve as config < LEVY_EULER_SEED /
 * LEVY_EULER_WORKERS < flags.  On failure error.json is written to the
 * output directory and the exit status is 2.
 */
int cli_main(int argc, char** argv);

}  // namespace levy_euler
