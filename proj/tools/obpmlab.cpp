#include "obpm/cli.hpp"

int main(int argc, char** argv) { return obpm::cli::run_cli(argc, argv); }
