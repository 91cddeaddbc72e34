#include "mscale/cli.hpp"

int main(int argc, char** argv) { return mscale::cli_main(argc, argv); }
