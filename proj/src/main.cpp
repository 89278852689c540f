#include <qlgs/cli.hpp>

int main(int argc, char** argv) { return qlgs::main_entry(argc, argv); }
