#include "finom_cli/commands.hpp"

int main(int argc, char** argv) { return finom::cli::run(argc, argv); }
