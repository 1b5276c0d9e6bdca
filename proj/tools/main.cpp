#include <chainzono_app/commands.hpp>

int main(int argc, char** argv) { return chainzono::app::run_cli(argc, argv); }
