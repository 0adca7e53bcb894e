#ifndef TWINLIGHT_CLI_COMMANDS_H_
#define TWINLIGHT_CLI_COMMANDS_H_

#include <string>
#include <vector>

namespace twinlight {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;       // unexpected runtime failure
inline constexpr int kExitPrecondition = 2;  // invalid input values or usage
inline constexpr int kExitIo = 3;            // unreadable, unwritable or malformed files

// Runs one subcommand; args exclude the program name.
int RunCli(const std::vector<std::string>& args);

// Appends "--key value" for each [settings] entry of the --config file whose
// flag is absent from `args`, so flags override the file.
std::vector<std::string> MergeConfigFile(const std::vector<std::string>& args);

// "0,2,5-7" -> {0, 2, 5, 6, 7}.
std::vector<int> ParseFrameList(const std::string& text);

}  // namespace twinlight

#endif  // TWINLIGHT_CLI_COMMANDS_H_
