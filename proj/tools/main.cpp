#include "sclaw/cli/app.hpp"

int main(int argc, char** argv) { return sclaw::cli::run(argc, argv); }
