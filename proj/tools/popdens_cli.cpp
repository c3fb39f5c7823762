#include "popdens/cli.hpp"

int main(int argc, char** argv) { return popdens::cli_main(argc, argv); }
