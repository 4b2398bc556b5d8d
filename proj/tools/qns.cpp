#include "qns/app/commands.hpp"

int main(int argc, char** argv) { return qns::app::run_cli(argc, argv); }
