#include <holoscope/cli.hpp>

int main(int argc, char** argv) { return holoscope::cli::run_main(argc, argv); }
