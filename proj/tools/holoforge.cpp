#include "holoforge/cli.hpp"

int main(int argc, char** argv) { return holoforge::cli::run(argc, argv); }
