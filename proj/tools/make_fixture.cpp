// Regenerates the shipped synthetic panels.
#include <filesystem>
#include <iostream>

#include "sharpefolio/synthetic.hpp"

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
    std::filesystem::create_directories(dir);
    sharpefolio::write_panel(sharpefolio::make_synthetic_panel(), dir / "fixture.csv");
    sharpefolio::write_panel(sharpefolio::make_rigged_gp_panel(), dir / "gp_rigged.csv");
    std::cout << "wrote " << (dir / "fixture.csv").string() << " and " << (dir / "gp_rigged.csv").string() << '\n';
    return 0;
}
