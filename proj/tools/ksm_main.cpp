#include "ksm/cli.hpp"

int main(int argc, char** argv) {
    return ksm::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
