#include "fareval/cli.hpp"

int main(int argc, char** argv) { return fareval::run_cli(argc, argv); }
