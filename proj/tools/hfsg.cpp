#include <string>
#include <vector>

#include "hfsg/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return hfsg::run_cli(args);
}
