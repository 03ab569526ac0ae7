// Writes the bundled demo scenario, plans and desired effects into a directory.
// The checked-in copies under data/demo are produced by this tool.

#include <filesystem>
#include <iostream>

#include "wargame/demo.hpp"
#include "wargame/io.hpp"

int main(int argc, char** argv) {
    using namespace wargame;
    if (argc != 2) {
        std::cerr << "usage: make_demo_data <output-dir>\n";
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);
    io::write_text_file(dir / "scenario.json", io::dump(io::to_json(demo::scenario())));
    io::write_text_file(dir / "empty_plan.json", io::dump(io::to_json(demo::empty_plan())));
    io::write_text_file(dir / "integrated_plan.json", io::dump(io::to_json(demo::integrated_plan())));
    io::write_text_file(dir / "security_plan.json", io::dump(io::to_json(demo::security_plan())));
    io::write_text_file(dir / "reconstruction_plan.json", io::dump(io::to_json(demo::reconstruction_plan())));
    io::write_text_file(dir / "effects.json", io::dump(io::effects_to_json(demo::desired_effects())));
    return 0;
}
