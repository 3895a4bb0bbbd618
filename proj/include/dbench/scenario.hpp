#pragma once

#include "dbench/common.hpp"
#include "dbench/transversality.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dbench {

/// Scenario document rejected before any computation.
class SchemaError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitSchema = 2, kExitSolver = 3 };

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<double> tol;  // eigen-solver and CG residual target
};

struct RunOutcome {
    int exit_code = kExitOk;
    std::string report;                // JSON text; empty on schema errors
    std::vector<std::string> written;  // files written, in order
    std::string message;
};

/// Parses and validates a scenario; throws SchemaError naming the offending key.
void validate_scenario(const std::string& json_text);

/// Runs a scenario given as text. Relative file references resolve against
/// base_dir. Nothing is written when the scenario is rejected.
RunOutcome run_scenario_text(const std::string& json_text, const std::string& base_dir, const RunOverrides& ov);

RunOutcome run_scenario(const std::string& path, const RunOverrides& ov);

/// Sampled transversality verdict for the geometry and bundle of a scenario file.
TransversalityVerdict scenario_transversality(const std::string& path);

}  // namespace dbench
