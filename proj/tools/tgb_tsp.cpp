#include "tgbtsp/cli.hpp"

int main(int argc, char** argv) { return tgbtsp::cli::run(argc, argv); }
