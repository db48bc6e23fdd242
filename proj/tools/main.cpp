#include "relret/cli.hpp"

int main(int argc, char** argv) { return relret::run_cli(argc, argv); }
