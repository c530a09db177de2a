#include <string>
#include <vector>

#include "fracscrew/cli.hpp"

int main(int argc, char** argv) {
    return fracscrew::cli::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
