#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qtk {

// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 2,      // QASM file does not parse
    kExitExecution = 3,  // runtime failure while executing
    kExitUnknown = 4,    // unknown command name
    kExitInvalid = 5,    // invalid or missing parameters
};

// args excludes the program name: {"grover", "--n", "2", ...}.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

// "0.8pi", "pi", "-pi/4" or a plain number.
double parse_angle(const std::string &text);

}  // namespace qtk
