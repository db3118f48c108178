#ifndef FIXPOINT_CLI_HPP
#define FIXPOINT_CLI_HPP

#include <iosfwd>

namespace fixpoint::cli {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_domain_error = 3;
inline constexpr int exit_not_converged = 4;

/// Entry point of `fixpoint-race <race|verify|bounds|depend|audit> [--config FILE] [flags]`.
/// Artifacts go to files; `out` receives a one-line summary, `err` warnings.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fixpoint::cli

#endif // FIXPOINT_CLI_HPP
