#include "mixprec/cli.hpp"

int main(int argc, char** argv) { return mixprec::cli_main(argc, argv); }
