#include <vector>
#include <string>

#include "torusglue/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return torusglue::cli::run(args).exit_code;
}
