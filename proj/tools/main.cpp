#include "scalarcf/cli.hpp"

int main(int argc, char** argv) { return scalarcf::cli_main(argc, argv); }
