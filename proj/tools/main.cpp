#include "commands.hpp"

int main(int argc, char** argv) { return ucpc::cli::run(argc, argv); }
