#include "sbpsat/cli.hpp"

int main(int argc, char** argv) { return sbpsat::cli::run_cli(argc, argv); }
