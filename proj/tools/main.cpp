#include "entrel/cli.hpp"

int main(int argc, char** argv) { return entrel::cli::main(argc, argv); }
