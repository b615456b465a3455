#include "ldg/app.hpp"

int main(int argc, char** argv) { return ldg::run(argc, argv); }
