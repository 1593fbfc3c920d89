#include "usc/cli.hpp"

int main(int argc, char** argv) { return usc::cli_main(argc, argv); }
