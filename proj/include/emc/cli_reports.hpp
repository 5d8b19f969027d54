#pragma once

// Command-line pipeline: resolves a run configuration from flags and an
// optional key-value file, executes one analysis and writes its reports.

#include "emc/tolerances.hpp"

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace emc {

enum class Command { classify, density, correlate, cluster, groupwalk, selftest };

Command parse_command(const std::string &name);
std::string command_name(Command c);

/// Keys accepted in config files and by `RunConfig::resolve`; flags use the
/// same names with a leading "--".
const std::vector<std::string> &setting_keys();

/// Reads "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string &path);

struct RunConfig {
    Command command = Command::classify;
    std::string input;  // matrix file or inline CSV
    std::string group;  // group spec file or inline JSON
    std::string phases; // "", "random", phase JSON file or inline JSON
    std::vector<double> alpha;
    std::size_t k = 2;
    std::size_t gap_max = 200;
    std::string out = ".";
    std::uint64_t seed = 0;
    std::string word;   // correlate: space-separated site tokens
    std::string obs_a = "e:0:0";
    std::string obs_b = "e:0:0";
    std::string inject; // selftest hook: sqrt_cache | phase_modulus
    Tolerances tol;
    std::map<std::string, std::string> settings; // resolved, for hashing

    /// `file` is applied first, then `flags`.
    static RunConfig resolve(Command command, const std::map<std::string, std::string> &file,
                             const std::map<std::string, std::string> &flags);

    /// FNV-1a over the resolved settings (excluding "out") and input contents.
    std::string hash() const;
};

/// Runs one command. Returns the process exit code: 0 success, 2 invalid
/// input, 3 numerical invariant violated. Diagnostics go to `err`.
int run(const RunConfig &config, std::ostream &out, std::ostream &err);

} // namespace emc
