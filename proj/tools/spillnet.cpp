#include "spillnet/app.hpp"

int main(int argc, char** argv) { return spillnet::app::run_cli(argc, argv); }
