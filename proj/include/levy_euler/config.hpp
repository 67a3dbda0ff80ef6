#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "levy_euler/generator.hpp"
#include "levy_euler/harness.hpp"

namespace levy_euler {

/*!
 * Test function by catalog name.
 *
 * Families and their parameters: "gaussian-mixture" (weights, centers,
 * widths), "radial-power" (center, power, r1, r2), "weierstrass"
 * (wavevector, base, beta, terms, phase), "plane-wave" (wavevector,
 * amplitude, phase), "constant" (value).  offset is added to any family.
 */
struct FunctionSpec
{
    std::string family = "constant";
    std::vector<double> center;
    std::vector<double> wavevector;
    std::vector<double> weights;
    std::vector<double> centers;
    std::vector<double> widths;
    double power = 1.0;
    double r1 = 1.0;
    double r2 = 2.0;
    double base = 2.0;
    double beta = 1.0;
    int terms = 12;
    double amplitude = 1.0;
    double phase = 0.0;
    double value = 0.0;
    double offset = 0.0;
};

TestFunction make_test_function(FunctionSpec const& spec);
//! Same function with the growth class used by the jump-integral tails.
DeclaredFunction make_declared_function(FunctionSpec const& spec);

struct ModelBlock
{
    double alpha = 2.0;
    int d = 1;
    int m = 1;
    std::vector<double> x0{0.0};
    double T = 1.0;
    WienerNormalization wiener = WienerNormalization::exponent_limit;
    std::string field = "constant";
    FieldParams params;
};

struct JumpBlock
{
    double rate = 0.0;
    double mu = 1.0;
    JumpDistribution jump = AtomJumps{{{0.0}}, {1.0}};
};

struct TestBlock
{
    double beta = 1.0;                 // β of the rate law
    std::optional<FunctionSpec> g;     // terminal functional
    std::optional<FunctionSpec> f;     // running functional
};

struct GridBlock
{
    std::vector<int> n{8, 16, 32, 64, 128};
    int n_ref = 0;  // 0: 16 · max n
    int reference_steps() const;
};

struct McBlock
{
    std::uint64_t n_paths = 10000;
    std::uint64_t seed = 1;
    int workers = 0;
    double max_excluded_fraction = 1e-3;
};

enum class ReportMode
{
    rate,       // slope and envelope
    exactness   // every |estimate| ≤ 3·stderr
};

struct ReportBlock
{
    ReportMode mode = ReportMode::rate;
    std::optional<double> min_slope;  // default: theory exponent - 0.15
    bool check_slope = true;
    FitModel fit_model = FitModel::power;
};

struct OneStepBlock
{
    std::optional<FunctionSpec> f;  // default: test.g
    std::vector<int> n{8, 16, 32, 64, 128};
    std::optional<double> min_slope;
};

struct GeneratorBlock
{
    std::optional<FunctionSpec> u;  // default: test.g
    std::vector<double> h{1e-3};
    double max_relative_error = 0.05;
    QuadratureSpec quadrature;
};

//! unit: law with exponent dt·|ξ|^α; driver: the increment U_dt itself.
enum class SampleScale
{
    unit,
    driver
};

struct SampleBlock
{
    std::uint64_t n = 100000;
    double dt = 1.0;
    SampleScale scale = SampleScale::unit;
};

struct ExperimentConfig
{
    RateVariant variant = RateVariant::main;
    ModelBlock model;
    JumpBlock z;
    TestBlock test;
    GridBlock grids;
    McBlock mc;
    ReportBlock report;
    OneStepBlock one_step;
    GeneratorBlock generator;
    SampleBlock sample;

    StableDriverSpec driver() const;
    LevyMeasureSpec jumps() const;
    CoefficientField field() const;
    Experiment experiment() const;
    McOptions mc_options() const;
    RateLaw theory() const;
};

/*!
 * Reads and validates a config.  Every violation found is collected into a
 * single ConfigError; hypothesis violations name the inequality.
 */
ExperimentConfig config_from_json(nlohmann::json const& j);
ExperimentConfig parse_config(std::filesystem::path const& path);

//! Full effective config; config_from_json(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(ExperimentConfig const& c);

}  // namespace levy_euler
