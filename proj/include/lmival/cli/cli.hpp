#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmival/models/model.hpp"
#include "lmival/sdp/solver.hpp"

namespace lmival::cli {

enum class Verdict { validated, not_validated, inconclusive };

char const* to_string(Verdict v) noexcept;

inline constexpr int exit_validated = 0;
inline constexpr int exit_not_validated = 1;
inline constexpr int exit_inconclusive = 2;
inline constexpr int exit_usage = 64;

int exit_code(Verdict v) noexcept;

/// Bad command line or unknown model; maps to exit code 64.
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct OrderRecord {
    unsigned order = 0;
    std::string status;
    //! External sign (the model's own sense); absent without a solution.
    std::optional<double> bound;
    int iterations = 0;
    double gap = 0.0;
    double rel_gap = 0.0;
    std::vector<std::pair<std::string, double>> masses;
    std::size_t moments = 0;
    double wall_time = 0.0;
    bool extended_precision = false;
    std::string message;
};

struct OracleRecord {
    std::string method;  // "simulate" or "monte-carlo"
    std::optional<double> objective;
    std::vector<double> initial;
    std::size_t samples = 0;
    //! Cell occupancy of the best trajectory.
    std::vector<std::pair<std::string, double>> occupancy;
    bool sandwich = true;
    std::string message;
};

struct ValidationReport {
    std::string model;
    std::string model_hash;
    std::string sense;
    std::optional<double> max_bound;
    std::optional<double> min_bound;
    std::vector<OrderRecord> orders;
    std::optional<OracleRecord> oracle;
    Verdict verdict = Verdict::inconclusive;
    std::string message;
};

struct ValidateOptions {
    std::vector<unsigned> orders;
    //! Maximization: validated when the tightest bound is at most this.
    std::optional<double> max_bound;
    //! Minimization: validated when the tightest bound is at least this.
    std::optional<double> min_bound;
    sdp::SolveOptions solver;
    //! Monte Carlo samples for free initial sets; 0 skips the oracle.
    std::size_t mc_samples = 200;
    std::uint64_t seed = 1;
    std::size_t sim_steps = 20000;
    unsigned threads = 0;
};

//! FNV-1a of the canonical model document, as 16 hex digits.
std::string model_hash(models::PiecewiseModel const& m);

//! Built-in name or path to a model file; throws UsageError otherwise.
models::PiecewiseModel resolve_model(std::string const& ref);

//! "1,2,4" or "1..4"; ascending and nonempty, else UsageError.
std::vector<unsigned> parse_orders(std::string const& text);

/// Hierarchy of bounds plus the simulation sandwich. Module errors end up
/// in the report (verdict inconclusive); nothing is thrown past argument
/// checks.
ValidationReport validate(models::PiecewiseModel const& m, ValidateOptions const& o);

nlohmann::json to_json(ValidationReport const& r);

//! Key/type skeleton of a JSON value; arrays keep their first element only.
nlohmann::json json_schema(nlohmann::json const& v);

//! Entry point of the `lmival` tool; returns the process exit code.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace lmival::cli
