#include "cli_commands.hpp"

int main(int argc, char** argv) { return blocknys::cli::run(argc, argv); }
