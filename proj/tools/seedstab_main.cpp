#include "seedstab/cli.hpp"

int main(int argc, char** argv) { return seedstab::cli_main(argc, argv); }
