#include <vector>
#include <string>

#include "changeauc/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return changeauc::run_cli(args);
}
