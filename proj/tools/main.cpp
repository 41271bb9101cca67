#include <vector>

#include "dialaudit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dialaudit::cli::run(args);
}
