#include "levy_euler/cli.hpp"

int main(int argc, char** argv)
{
    return levy_euler::cli_main(argc, argv);
}
