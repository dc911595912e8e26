#include "chaoscope_cli.hpp"

int main(int argc, char** argv) { return chaoscope::cli::run(argc, argv); }
