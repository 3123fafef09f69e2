#include "armloc/cli.hpp"

int main(int argc, char** argv) { return armloc::cli::cli_dispatch(argc, argv); }
