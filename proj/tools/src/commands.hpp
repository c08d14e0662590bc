#pragma once
// Subcommand implementations.  Each returns a process exit code (0 success);
// configuration and numerical failures are signalled by the exceptions from
// the core library and mapped to exit codes in main().

#include <string>

#include "config.hpp"

namespace twistrad::cli {

struct CommandFlags {
    bool fieldfree = false;
    bool dipole = false;
    bool quick = false;
    std::string out_override; // --out, takes precedence over [output] path
};

int cmd_ermakov(const RunConfig& config, const CommandFlags& flags);
int cmd_rate(const RunConfig& config, const CommandFlags& flags);
int cmd_sweep(const RunConfig& config, const CommandFlags& flags);
int cmd_verify(const CommandFlags& flags);

} // namespace twistrad::cli
