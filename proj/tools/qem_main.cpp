#include "qem/cli.hpp"

int main(int argc, char** argv) { return qem::cli_main(argc, argv); }
