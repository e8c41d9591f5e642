#include "spinfan/cli.hpp"

int main(int argc, char **argv) { return spinfan::cli::run(argc, argv); }
