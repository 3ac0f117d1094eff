#include <string>
#include <vector>

#include "confaudit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return confaudit::run_cli(args);
}
