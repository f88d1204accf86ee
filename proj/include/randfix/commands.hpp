#ifndef RANDFIX_COMMANDS_HPP
#define RANDFIX_COMMANDS_HPP

// The batch commands behind the CLI binary. Each takes a loaded scenario,
// writes its artifacts into the output directory, and returns the process
// exit status. Everything a command emits is derived from the scenario
// document and its seed, so a rerun writes byte-identical files.

#include <iosfwd>
#include <string>
#include <vector>

#include "randfix/scenario.hpp"

namespace randfix {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertFail = 1;
inline constexpr int kExitNoConverge = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;

// --out flag if nonempty, else $RANDFIX_OUT_DIR, else the current
// directory. Creates the directory when missing.
std::string resolve_out_dir(const std::string& flag_value);

// Full hypothesis audit. Writes <name>_validate.json; exit 0 iff the audit
// verdict is pass or probe-pass.
int cmd_validate(const Scenario& sc, const std::string& out_dir);

// Orbit run plus convergence diagnostics. Writes <name>_solve.json and
// <name>_trace.csv; exit 0 iff the main orbit converged, 2 otherwise. The
// diagnostic stages can be red without changing the exit status; they are
// judged by the report's consumer.
int cmd_solve(const Scenario& sc, const std::string& out_dir);

// Lemma-level oracles: gauge and majorant hypotheses, the tail-sup exchange
// on orbit and synthetic sequences, quasi-metric comparisons, the orbit
// inequality, and the iterated-gauge reduction round-trip when the scenario
// declares one. Writes <name>_certify.json; exit 0 iff every stage is pass
// or probe-pass.
int cmd_certify(const Scenario& sc, const std::string& out_dir);

// Merges report files into one scenario x stage x verdict table on `out`.
// Exit 0 when every merged stage passed, 1 when any failed, 65 on a file
// that is not a report.
int cmd_report(const std::vector<std::string>& paths, std::ostream& out);

}  // namespace randfix

#endif
