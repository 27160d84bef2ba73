#include "gaussmet/cli.hpp"

int main(int argc, char** argv)
{
    return gaussmet::cli::run(argc, argv);
}
