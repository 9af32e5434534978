#include "inplay/cli.hpp"

int main(int argc, char** argv) {
    return inplay::cli::run(argc, argv);
}
