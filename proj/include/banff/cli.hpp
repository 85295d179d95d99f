#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "banff/ingest.hpp"
#include "banff/scoring.hpp"

namespace banff::cli {

/// Merged run configuration: built-in defaults, then the config file, then flags.
struct RunConfig {
    AliasTable aliases = AliasTable::defaults();
    ScoringConfig scoring;
    std::optional<std::uint64_t> seed;
    std::size_t trials = 1000;
    std::size_t threads = 1;
    std::filesystem::path out_dir = ".";

    /// Applies one key = value setting. Throws SchemaViolation for unknown keys
    /// or unparsable values.
    void apply(const std::string& key, const std::string& value);

    /// Settings that influence results, echoed into every output. Execution-only
    /// settings (threads, out_dir) are left out so they cannot change output bytes.
    std::map<std::string, std::string> effective() const;
};

/// Parses a plain-text "key = value" document. '#' starts a comment line.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

/// Reads and applies a config file; alias keys are applied before class lists
/// so class names can use the file's own aliases.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Entry point shared by the executable and the tests. Returns the process
/// exit code: 0 success, 2 input or validation error, 1 internal failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace banff::cli
