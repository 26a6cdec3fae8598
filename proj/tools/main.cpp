#include "tsis/cli.hpp"

int main(int argc, char** argv) { return tsis::cli_main(argc, argv); }
