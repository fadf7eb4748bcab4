// rabi-geom command-line tool; see `rabi-geom --help`.

#include "rabigeom/cli.hpp"

int main(int argc, char** argv) { return rabigeom::cli::run(argc, argv); }
