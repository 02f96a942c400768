#include "cashmgmt/cli.hpp"

int main(int argc, char** argv) { return cashmgmt::cli::run(argc, argv); }
