#include <vector>

#include "pinchflow/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pinchflow::run_command(args);
}
