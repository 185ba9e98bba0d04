#include "wienergauge/cli.hpp"

int main(int argc, char** argv) { return wienergauge::main_entry(argc, argv); }
