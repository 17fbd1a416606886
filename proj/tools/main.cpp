#include "nls/cli.hpp"

int main(int argc, char** argv) { return nls::run_cli(argc, argv); }
