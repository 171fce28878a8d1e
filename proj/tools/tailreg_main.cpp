#include "tailreg/cli/app.hpp"

int main(int argc, char** argv) { return tailreg::cli::run_main(argc, argv); }
