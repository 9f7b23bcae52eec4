#ifndef ENTREL_CLI_HPP
#define ENTREL_CLI_HPP

// Command-line front end: extract, relate, eval, stats, dict-stats.

#include <ostream>
#include <string>
#include <vector>

namespace entrel::cli {

// args excludes the program name. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace entrel::cli

#endif  // ENTREL_CLI_HPP
