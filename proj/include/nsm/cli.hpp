#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nsm::cli {

// Stable process exit codes.
enum ExitCode : int {
    kSuccess = 0,  // also "consistent" for `check`
    kInconsistent = 1,
    kInputError = 2,
    kDegenerate = 3,
    kIndeterminate = 4,
};

inline constexpr double kDefaultTauMax = 30.0;
inline constexpr int kDefaultTauPoints = 61;

// NSM_DEFAULT_TAU_MAX when set to a positive number, kDefaultTauMax otherwise.
double default_tau_max();

// "lo:hi:step", inclusive of hi up to rounding. Throws std::invalid_argument.
std::vector<double> parse_lambda_grid(std::string_view spec);

// Default fitting grid {0.1, 0.2, ..., 3.0}.
std::vector<double> default_lambda_grid();

// Entry point shared by the executable and the tests. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nsm::cli
