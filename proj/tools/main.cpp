#include "pft/cli.hpp"

int main(int argc, char** argv) { return pft::cli_main(argc, argv); }
