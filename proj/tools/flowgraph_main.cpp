#include "flow/cli.hpp"

int main(int argc, char** argv) { return flow::cli_main(argc, argv); }
