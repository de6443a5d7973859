#include "cli.hpp"

int main(int argc, char** argv) { return gasdiff::cli::run_cli(argc, argv); }
