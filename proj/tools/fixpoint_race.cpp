#include "fixpoint/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
   return fixpoint::cli::run(argc, argv, std::cout, std::cerr);
}
