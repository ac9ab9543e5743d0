#include <iostream>

#include "rach/experiment.h"

int
main(int argc, char** argv)
{
    return rach::run_cli(argc, argv, std::cout, std::cerr);
}
