#include "rsdsim/cli.hpp"

int main(int argc, char** argv) {
    return rsdsim::cli_main(argc, argv);
}
