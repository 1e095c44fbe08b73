#include "tradescope/cli.hpp"
int main(int argc, char** argv) { return tradescope::run_cli(argc, argv); }
