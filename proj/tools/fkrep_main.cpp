#include <iostream>

#include "CLI11.hpp"
#include "fkrep/cli_spec.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"fkrep: graphical Ising/Potts representations toolkit"};
    std::string spec_path;
    app.add_option("spec", spec_path, "run spec file (see docs/specfile.md)")
        ->required();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return fkrep::run_spec_file(spec_path, std::cerr);
}
