#include "drl/cli/cli.hpp"

int main(int argc, char** argv) { return drl::cli::run(argc, argv); }
