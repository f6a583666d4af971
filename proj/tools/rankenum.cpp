#include "rankenum/cli.hpp"

int main(int argc, char** argv) { return rankenum::cli::run_main(argc, argv); }
