#include "cli.hpp"

int main(int argc, char** argv) { return apm::cli::run(argc, argv); }
