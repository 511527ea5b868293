#include "ctrl/cli.hpp"

int main(int argc, char** argv) { return ctrl::cli::run(argc, argv); }
