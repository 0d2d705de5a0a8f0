#include "cli_app.hpp"

int main(int argc, char** argv) { return fibfrac::cli::run(argc, argv); }
