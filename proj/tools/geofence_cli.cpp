#include "geofence/cli.hpp"

int main(int argc, char** argv) { return geofence::cli::run_cli(argc, argv); }
