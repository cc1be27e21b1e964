#include "eazy/cli.hpp"

int main(int argc, char** argv) { return eazy::cli_main(argc, argv); }
