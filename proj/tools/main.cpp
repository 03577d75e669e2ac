#include "cli.hpp"

int main(int argc, char **argv) {
    return umbilic::cli::runCli(argc, argv, {std::cout, std::cerr});
}
