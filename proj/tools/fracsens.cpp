#include "fracsens/cli.hpp"

int main(int argc, char** argv) { return fracsens::cli::run(argc, argv); }
