#include "ineqforge/cli.hpp"

int main(int argc, char** argv) { return ineqforge::cli_main(argc, argv); }
